#pragma once

// Reproducing kernels and the kernel-product algebra used to turn
// feature-space block matrices into real Gram-type matrices.

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace grassclust {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

struct LinearKernel {};

/// exp(-||a - b||^2 / (2 sigma^2))
struct GaussianKernel {
  double sigma;
};

/// exp(-||a - b||_1 / sigma)
struct LaplacianKernel {
  double sigma;
};

/// (a'b + 1)^degree
struct PolynomialKernel {
  int degree;
};

using BaseKernel = std::variant<LinearKernel, GaussianKernel, LaplacianKernel, PolynomialKernel>;

struct MixtureTerm {
  double weight;
  BaseKernel kernel;
};

/// A single base kernel or a convex combination of base kernels.
///
/// Mixtures nest at most one level deep; this is enforced by the type since
/// mixture terms hold a BaseKernel. Construction validates parameters and
/// throws ConfigError on a bad spec.
class KernelSpec {
 public:
  KernelSpec();  // linear
  explicit KernelSpec(BaseKernel kernel);
  explicit KernelSpec(std::vector<MixtureTerm> terms);

  static KernelSpec linear();
  static KernelSpec gaussian(double sigma);
  static KernelSpec laplacian(double sigma);
  static KernelSpec polynomial(int degree);
  static KernelSpec mixture(std::vector<MixtureTerm> terms);

  /// Parses e.g. "gaussian(0.8)" or "0.6*gaussian(0.8)+0.4*laplacian(1.0)".
  static KernelSpec parse(std::string_view text);

  bool is_mixture() const noexcept { return terms_.size() > 1 || terms_.front().weight != 1.0; }
  const std::vector<MixtureTerm>& terms() const noexcept { return terms_; }

  double operator()(const VectorRef& a, const VectorRef& b) const;

  /// Canonical text form, accepted by parse().
  std::string to_string() const;

 private:
  void validate() const;

  std::vector<MixtureTerm> terms_;
};

double eval_base_kernel(const BaseKernel& kernel, const VectorRef& a, const VectorRef& b);

/// kernel(a, b), throwing InputError on a dimension mismatch.
double eval_kernel(const KernelSpec& spec, const VectorRef& a, const VectorRef& b);

/// Entry (i, j) = kernel(rows[i], cols[j]).
Matrix gram_matrix(const KernelSpec& spec, const std::vector<Vector>& rows, const std::vector<Vector>& cols);

}  // namespace grassclust
