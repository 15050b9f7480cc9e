#pragma once

#include <Eigen/Core>
#include <span>
#include <variant>
#include <vector>

namespace robpost::stats {

enum class Kernel { gaussian };
enum class BandwidthRule { silverman };

struct KernelSpec {
  Kernel kernel = Kernel::gaussian;
  std::variant<double, BandwidthRule> bandwidth = BandwidthRule::silverman;
};

/// 0.9 min(sd, IQR/1.34) n^(-1/5) on weighted moments; n is the effective sample size.
double silverman_bandwidth(std::span<const double> x, std::span<const double> w);

/// Weighted Gaussian kernel density estimate evaluated on `grid`.
/// Empty `weights` means equal weights.
std::vector<double> kde(std::span<const double> points, std::span<const double> weights, const KernelSpec& spec,
                        std::span<const double> grid);

/// Nadaraya-Watson regression with a product Gaussian kernel. Points are
/// sorted on the first coordinate and only a +-8h window is scanned.
class NwRegressor {
 public:
  NwRegressor(Eigen::MatrixXd x, Eigen::VectorXd y, const KernelSpec& spec);

  double operator()(const Eigen::VectorXd& query) const;
  /// True if the last evaluation needed a widened bandwidth or the global mean.
  bool extrapolated(const Eigen::VectorXd& query) const;

  const Eigen::VectorXd& bandwidth() const { return h_; }
  Eigen::Index size() const { return x_.rows(); }
  double global_mean() const { return global_mean_; }

 private:
  double evaluate(const Eigen::VectorXd& query, bool* widened) const;

  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd h_;
  Eigen::VectorXd lo_, hi_;
  double global_mean_ = 0.0;
};

double nw_regress(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const KernelSpec& spec,
                  const Eigen::VectorXd& query);

}  // namespace robpost::stats
