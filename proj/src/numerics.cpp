#include "transop/numerics.hpp"

#include "transop/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace transop {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidScale: return "InvalidScale";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::FeatureMismatch: return "FeatureMismatch";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::UnlabeledPoint: return "UnlabeledPoint";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

void require_square_finite(const Matrix& a, std::string_view what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    std::ostringstream os;
    os << what << " must be square and non-empty, got " << a.rows() << "x" << a.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (!a.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
  }
}

double norm_1(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

namespace {

// Diagonal Pade coefficients b_0..b_m and the 1-norm bounds below which
// each order meets double-precision backward error.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

// Low orders: U = A * sum_k b_{2k+1} A^{2k}, V = sum_k b_{2k} A^{2k}.
template <std::size_t N>
void pade_low(const Matrix& a, const std::array<double, N>& b, Matrix& u, Matrix& v) {
  const Eigen::Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = ident;
  Matrix odd = Matrix::Zero(n, n);
  Matrix even = Matrix::Zero(n, n);
  for (std::size_t k = 0; 2 * k < N; ++k) {
    even += b[2 * k] * power;
    if (2 * k + 1 < N) odd += b[2 * k + 1] * power;
    power = power * a2;
  }
  u = a * odd;
  v = even;
}

void pade13(const Matrix& a, Matrix& u, Matrix& v) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  u = a * (inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix inner_v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  v = inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
}

}  // namespace

Matrix expm(const Matrix& a) {
  require_square_finite(a, "expm argument");
  const double norm = norm_1(a);
  Matrix u;
  Matrix v;
  int squarings = 0;
  if (norm <= kTheta3) {
    pade_low(a, kPade3, u, v);
  } else if (norm <= kTheta5) {
    pade_low(a, kPade5, u, v);
  } else if (norm <= kTheta7) {
    pade_low(a, kPade7, u, v);
  } else if (norm <= kTheta9) {
    pade_low(a, kPade9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    pade13(a / std::ldexp(1.0, squarings), u, v);
  }
  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!result.allFinite()) {
    std::ostringstream os;
    os << "expm overflowed for input with 1-norm " << norm;
    throw Error(ErrorKind::NonFinite, os.str());
  }
  return result;
}

std::pair<Matrix, Matrix> expm_frechet(const Matrix& a, const Matrix& e) {
  require_square_finite(a, "expm_frechet argument");
  if (e.rows() != a.rows() || e.cols() != a.cols()) {
    std::ostringstream os;
    os << "direction is " << e.rows() << "x" << e.cols() << ", argument is " << a.rows() << "x"
       << a.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (!e.allFinite()) throw Error(ErrorKind::NonFinite, "expm_frechet direction has non-finite entries");
  const Eigen::Index n = a.rows();
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a;
  block.topRightCorner(n, n) = e;
  block.bottomRightCorner(n, n) = a;
  const Matrix big = expm(block);
  return {big.topLeftCorner(n, n), big.topRightCorner(n, n)};
}

Matrix expm_adjoint(const Matrix& a, const Matrix& g) {
  return expm_frechet(a.transpose(), g).second;
}

Matrix hessenberg(const Matrix& a) {
  Matrix h = a;
  const Eigen::Index n = h.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    Vector x = h.col(k).segment(k + 1, n - k - 1);
    const double alpha = x.norm();
    if (alpha == 0.0) continue;
    const double sign = x(0) >= 0.0 ? 1.0 : -1.0;
    x(0) += sign * alpha;
    const double vnorm = x.norm();
    if (vnorm == 0.0) continue;
    x /= vnorm;
    // H <- P H P with P = I - 2 v v^T acting on rows/cols k+1..n-1.
    auto rows = h.bottomRows(n - k - 1);
    rows -= 2.0 * x * (x.transpose() * rows);
    auto cols = h.rightCols(n - k - 1);
    cols -= 2.0 * (cols * x) * x.transpose();
    for (Eigen::Index i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
  return h;
}

namespace {

double copy_sign(double magnitude, double sign_of) {
  return sign_of >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& input, const NumericsConfig& cfg) {
  require_square_finite(input, "eigenvalues argument");
  Matrix a = hessenberg(input);
  const int n = static_cast<int>(a.rows());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  const double eps = std::numeric_limits<double>::epsilon();

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      // Look for a single small subdiagonal element.
      for (l = nn; l > 0; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        out[static_cast<std::size_t>(nn--)] = x + t;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          // Trailing 2x2 block.
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + copy_sign(z, p);
            out[static_cast<std::size_t>(nn - 1)] = out[static_cast<std::size_t>(nn)] = x + z;
            if (z != 0.0) out[static_cast<std::size_t>(nn)] = x - w / z;
          } else {
            out[static_cast<std::size_t>(nn)] = {x + p, -z};
            out[static_cast<std::size_t>(nn - 1)] = {x + p, z};
          }
          nn -= 2;
        } else {
          if (its == cfg.qr_max_iterations) {
            std::ostringstream os;
            os << "QR iteration did not converge (dimension " << n << ", Frobenius norm "
               << input.norm() << ")";
            throw Error(ErrorKind::ConvergenceFailure, os.str());
          }
          if (its == 10 || its == 20) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0;
          double q = 0.0;
          double r = 0.0;
          double z = 0.0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          // Double-shift QR sweep on rows/columns l..nn.
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = copy_sign(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return out;
}

double frobenius_inner(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

double relative_error(const Matrix& a, const Matrix& b) {
  const double diff = (a - b).norm();
  const double scale = b.norm();
  return scale > 0.0 ? diff / scale : diff;
}

Vector central_difference_gradient(const ScalarFn& f, const Vector& x, double h) {
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

Matrix central_difference_gradient(const MatrixScalarFn& f, const Matrix& x, double h) {
  Matrix grad(x.rows(), x.cols());
  Matrix probe = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      probe(i, j) = x(i, j) + h;
      const double up = f(probe);
      probe(i, j) = x(i, j) - h;
      const double down = f(probe);
      probe(i, j) = x(i, j);
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

Matrix central_difference_directional(const std::function<Matrix(const Matrix&)>& f,
                                      const Matrix& x, const Matrix& direction, double h) {
  return (f(x + h * direction) - f(x - h * direction)) / (2.0 * h);
}

}  // namespace transop
