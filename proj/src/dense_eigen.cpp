// Dense nonsymmetric eigenvalues: balancing, Householder Hessenberg reduction,
// and the Francis double-shift QR iteration on the Hessenberg matrix.

#include "wentzell/error.hpp"
#include "wentzell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wentzell {

namespace {

using Eigen::Index;

// Diagonal similarity scaling by powers of two so row and column norms match.
void balance(Eigen::MatrixXd& a)
{
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Index i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

void to_hessenberg(Eigen::MatrixXd& a)
{
    const Index n = a.rows();
    for (Index k = 0; k + 2 < n; ++k) {
        Eigen::VectorXd v = a.col(k).tail(n - k - 1);
        const double alpha = v.norm();
        if (alpha == 0.0) continue;
        v(0) += v(0) >= 0.0 ? alpha : -alpha;
        const double vnorm = v.norm();
        if (vnorm == 0.0) continue;
        v /= vnorm;
        // A <- (I - 2vv^T) A (I - 2vv^T) restricted to the trailing block.
        auto rows = a.bottomRows(n - k - 1);
        rows -= 2.0 * v * (v.transpose() * rows);
        auto cols = a.rightCols(n - k - 1);
        cols -= 2.0 * (cols * v) * v.transpose();
    }
    for (Index i = 2; i < n; ++i)
        for (Index j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

double sign(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

std::vector<std::complex<double>> hessenberg_qr(Eigen::MatrixXd& a)
{
    const int n = static_cast<int>(a.rows());
    std::vector<std::complex<double>> wri(static_cast<std::size_t>(n));
    const double eps = std::numeric_limits<double>::epsilon();

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

    int nn = n - 1;
    double t = 0.0;
    double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l > 0; --l) {
                s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            x = a(nn, nn);
            if (l == nn) {
                wri[static_cast<std::size_t>(nn--)] = x + t;
            } else {
                y = a(nn - 1, nn - 1);
                w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    const auto hi = static_cast<std::size_t>(nn);
                    if (q >= 0.0) {
                        z = p + sign(z, p);
                        wri[hi - 1] = wri[hi] = x + z;
                        if (z != 0.0) wri[hi] = x - w / z;
                    } else {
                        wri[hi] = std::complex<double>(x + p, -z);
                        wri[hi - 1] = std::conj(wri[hi]);
                    }
                    nn -= 2;
                } else {
                    if (its == 60) throw NumericError("dense_spectrum: QR iteration did not converge");
                    if (its == 10 || its == 20 || its == 40) {
                        // Exceptional shift.
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
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
                    for (int k = m; k < nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
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
    return wri;
}

} // namespace

std::vector<std::complex<double>> dense_spectrum(const Eigen::MatrixXd& A)
{
    if (A.rows() != A.cols()) throw NumericError("dense_spectrum: matrix is not square");
    if (A.rows() > kDenseSpectrumLimit)
        throw NumericError("dense_spectrum: dimension " + std::to_string(A.rows()) +
                           " exceeds the limit of " + std::to_string(kDenseSpectrumLimit));
    if (!A.allFinite()) throw NumericError("dense_spectrum: non-finite entries");
    if (A.rows() == 0) return {};

    Eigen::MatrixXd a = A;
    balance(a);
    to_hessenberg(a);
    auto eig = hessenberg_qr(a);
    std::sort(eig.begin(), eig.end(), [](const auto& l, const auto& r) {
        if (l.real() != r.real()) return l.real() > r.real();
        return l.imag() > r.imag();
    });
    return eig;
}

} // namespace wentzell
