#include "hairrec/core/camera.hpp"

#include <cmath>
#include <sstream>

#include "hairrec/core/errors.hpp"

namespace hairrec {

void CameraView::validate() const {
  const Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
  const double inf_norm = err.cwiseAbs().maxCoeff();
  if (!(inf_norm < 1e-6)) {
    std::ostringstream os;
    os << "camera rotation is not orthonormal (|R^T R - I|_inf = " << inf_norm << ")";
    throw ValidationError(os.str());
  }
  if (!(fx > 0) || !(fy > 0)) throw ValidationError("camera focal lengths must be positive");
  if (width <= 0 || height <= 0) throw ValidationError("camera image size must be positive");
}

CameraView make_lookat_camera(const Vec3& eye, const Vec3& target, const Vec3& up,
                              double fx, double fy, int width, int height) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9) {
    // up parallel to the view direction: pick any perpendicular
    right = forward.cross(std::abs(forward.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX());
  }
  right.normalize();
  const Vec3 down = forward.cross(right).normalized();  // image y grows downward

  CameraView view;
  view.fx = fx;
  view.fy = fy;
  view.cx = width / 2.0;
  view.cy = height / 2.0;
  view.width = width;
  view.height = height;
  view.rotation.row(0) = right.transpose();
  view.rotation.row(1) = down.transpose();
  view.rotation.row(2) = forward.transpose();
  view.translation = -(view.rotation * eye);
  return view;
}

}  // namespace hairrec
