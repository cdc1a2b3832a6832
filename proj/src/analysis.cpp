#include "geogossip/analysis.hpp"

#include <cmath>

namespace geogossip {

double predict_tave(double lambda2, double epsilon) {
  if (!(lambda2 > 0.0 && lambda2 < 1.0)) throw InvalidInput("predict_tave: need 0 < lambda2 < 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidParameter("predict_tave: need 0 < eps < 1");
  return std::log(1.0 / epsilon) / std::log(1.0 / lambda2);
}

double predict_cost(std::size_t n, double epsilon, double mean_hops, double mean_q, double tave) {
  if (n == 0 || !(epsilon > 0.0) || !(mean_hops > 0.0) || !(mean_q > 0.0) || !(tave > 0.0))
    throw InvalidParameter("predict_cost: inputs must be positive");
  return mean_q * mean_hops * tave;
}

SpectralReport spectral_report(const Eigen::VectorXd& q, double epsilon) {
  const WeylCertificate cert = weyl_certificate(q);
  SpectralReport r;
  r.n = static_cast<std::size_t>(q.size());
  r.lambda2 = cert.lambda2;
  r.one_minus_lambda2_times_n = static_cast<double>(r.n) * (1.0 - cert.lambda2);
  r.weyl_bound = cert.bound;
  r.certificate_holds = cert.holds;
  r.tave_prediction = predict_tave(cert.lambda2, epsilon);
  return r;
}

}  // namespace geogossip
