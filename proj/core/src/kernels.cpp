#include "grassclust/kernels.hpp"

#include "grassclust/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace grassclust {

namespace {

constexpr double kWeightSumTol = 1e-12;

void validate_base(const BaseKernel& kernel) {
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, GaussianKernel> || std::is_same_v<K, LaplacianKernel>) {
          if (!(k.sigma > 0.0) || !std::isfinite(k.sigma)) {
            throw ConfigError("kernel bandwidth must be a positive finite number");
          }
        } else if constexpr (std::is_same_v<K, PolynomialKernel>) {
          if (k.degree < 1) throw ConfigError("polynomial kernel degree must be >= 1");
        }
      },
      kernel);
}

std::string base_to_string(const BaseKernel& kernel) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LinearKernel>) {
          os << "linear()";
        } else if constexpr (std::is_same_v<K, GaussianKernel>) {
          os << "gaussian(" << k.sigma << ")";
        } else if constexpr (std::is_same_v<K, LaplacianKernel>) {
          os << "laplacian(" << k.sigma << ")";
        } else {
          os << "polynomial(" << k.degree << ")";
        }
      },
      kernel);
  return os.str();
}

// Recursive-descent parser for: term ('+' term)*, term := [number '*'] name '(' [number] ')'.
class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  std::vector<MixtureTerm> parse() {
    std::vector<MixtureTerm> terms;
    bool any_weight = false;
    bool any_bare = false;
    do {
      skip_ws();
      double weight = 1.0;
      bool weighted = false;
      if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        weight = number();
        skip_ws();
        expect('*');
        weighted = true;
      }
      (weighted ? any_weight : any_bare) = true;
      terms.push_back({weight, base()});
      skip_ws();
    } while (accept('+'));
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    if (terms.size() > 1 && any_bare) fail("every mixture term needs an explicit weight");
    (void)any_weight;
    return terms;
  }

 private:
  BaseKernel base() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    skip_ws();
    bool has_args = accept('(');
    std::optional<double> arg;
    if (has_args) {
      skip_ws();
      if (!accept(')')) {
        arg = number();
        skip_ws();
        expect(')');
      }
    }
    if (name == "linear") {
      if (arg) fail("linear kernel takes no argument");
      return LinearKernel{};
    }
    if (!arg) fail("kernel '" + name + "' needs a parameter");
    if (name == "gaussian") return GaussianKernel{*arg};
    if (name == "laplacian") return LaplacianKernel{*arg};
    if (name == "polynomial" || name == "poly") {
      if (*arg != std::floor(*arg)) fail("polynomial degree must be an integer");
      return PolynomialKernel{static_cast<int>(*arg)};
    }
    fail("unknown kernel '" + name + "'");
  }

  double number() {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{}) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("kernel spec \"" + std::string(text_) + "\": " + msg + " at column " + std::to_string(pos_ + 1));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

KernelSpec::KernelSpec() : terms_{{1.0, LinearKernel{}}} {}

KernelSpec::KernelSpec(BaseKernel kernel) : terms_{{1.0, kernel}} { validate(); }

KernelSpec::KernelSpec(std::vector<MixtureTerm> terms) : terms_(std::move(terms)) { validate(); }

KernelSpec KernelSpec::linear() { return KernelSpec(BaseKernel{LinearKernel{}}); }
KernelSpec KernelSpec::gaussian(double sigma) { return KernelSpec(BaseKernel{GaussianKernel{sigma}}); }
KernelSpec KernelSpec::laplacian(double sigma) { return KernelSpec(BaseKernel{LaplacianKernel{sigma}}); }
KernelSpec KernelSpec::polynomial(int degree) { return KernelSpec(BaseKernel{PolynomialKernel{degree}}); }
KernelSpec KernelSpec::mixture(std::vector<MixtureTerm> terms) { return KernelSpec(std::move(terms)); }

KernelSpec KernelSpec::parse(std::string_view text) {
  // Strip one level of surrounding quotes, as written in config files.
  if (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') && text.back() == text.front()) {
    text = text.substr(1, text.size() - 2);
  }
  return KernelSpec(SpecParser(text).parse());
}

void KernelSpec::validate() const {
  if (terms_.empty()) throw ConfigError("kernel mixture needs at least one term");
  double total = 0.0;
  for (const auto& term : terms_) {
    if (!(term.weight >= 0.0) || !std::isfinite(term.weight)) {
      throw ConfigError("mixture weights must be nonnegative and finite");
    }
    validate_base(term.kernel);
    total += term.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw ConfigError("mixture weights must sum to 1 (got " + std::to_string(total) + ")");
  }
}

double eval_base_kernel(const BaseKernel& kernel, const VectorRef& a, const VectorRef& b) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LinearKernel>) {
          return a.dot(b);
        } else if constexpr (std::is_same_v<K, GaussianKernel>) {
          return std::exp(-(a - b).squaredNorm() / (2.0 * k.sigma * k.sigma));
        } else if constexpr (std::is_same_v<K, LaplacianKernel>) {
          return std::exp(-(a - b).lpNorm<1>() / k.sigma);
        } else {
          return std::pow(a.dot(b) + 1.0, k.degree);
        }
      },
      kernel);
}

double KernelSpec::operator()(const VectorRef& a, const VectorRef& b) const {
  if (terms_.size() == 1) return terms_.front().weight * eval_base_kernel(terms_.front().kernel, a, b);
  double value = 0.0;
  for (const auto& term : terms_) value += term.weight * eval_base_kernel(term.kernel, a, b);
  return value;
}

std::string KernelSpec::to_string() const {
  if (terms_.size() == 1) return base_to_string(terms_.front().kernel);
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << "+";
    os << terms_[i].weight << "*" << base_to_string(terms_[i].kernel);
  }
  return os.str();
}

double eval_kernel(const KernelSpec& spec, const VectorRef& a, const VectorRef& b) {
  if (a.size() != b.size()) {
    throw InputError("kernel arguments differ in dimension (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.size() == 0) throw InputError("kernel arguments must be nonempty");
  return spec(a, b);
}

Matrix gram_matrix(const KernelSpec& spec, const std::vector<Vector>& rows, const std::vector<Vector>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = eval_kernel(spec, rows[i], cols[j]);
    }
  }
  return out;
}

}  // namespace grassclust
