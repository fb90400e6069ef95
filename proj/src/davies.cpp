#include "jase/davies.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "jase/error.hpp"

namespace jase {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2Over8 = 0.0866433975699931636772;  // log(2)/8

// All weights carry one central chi-squared(1) component. State mutates as
// convergence factors fold extra Gaussian variance into sigsq.
struct Inverter {
  std::vector<double> lb;  // sorted by decreasing magnitude
  double c = 0.0;          // evaluation point
  double acc = 0.0;
  double xlim = 0.0;       // remaining integration-term budget
  double sigsq = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double lmax = 0.0;
  double lmin = 0.0;
  double intl = 0.0;
  double ersm = 0.0;
  bool fail = false;
  int fault = 0;

  // log(1+x) when first, else log(1+x) - x; series form keeps precision
  // near zero.
  static double log1(double x, bool first) {
    if (std::abs(x) > 0.1) {
      return first ? std::log(1.0 + x) : std::log(1.0 + x) - x;
    }
    const double y = x / (2.0 + x);
    double term = 2.0 * y * y * y;
    double k = 3.0;
    double s = (first ? 2.0 : -x) * y;
    const double y2 = y * y;
    for (double s1 = s + term / k; s1 != s; s1 = s + term / k) {
      k += 2.0;
      term *= y2;
      s = s1;
    }
    return s;
  }

  static double exp1(double x) { return x < -706.0 ? 0.0 : std::exp(x); }

  // Chernoff tail bound: returns a bound on P(Q > cx) (or the lower tail
  // for u < 0), with cx the matching cutoff.
  double errbd(double u, double* cx) const {
    double xconst = u * sigsq;
    double sum1 = u * xconst;
    u *= 2.0;
    for (double lj : lb) {
      const double x = u * lj;
      const double y = 1.0 - x;
      xconst += lj / y;
      sum1 += x * x / y + log1(-x, false);
    }
    *cx = xconst;
    return exp1(-0.5 * sum1);
  }

  // Smallest cutoff such that the tail beyond it is below accx; direction
  // set by the sign of *upn.
  double ctff(double accx, double* upn) const {
    double u2 = *upn;
    double u1 = 0.0;
    double c1 = mean;
    double c2 = 0.0;
    const double rb = 2.0 * ((u2 > 0.0) ? lmax : lmin);
    double u = u2 / (1.0 + u2 * rb);
    while (errbd(u, &c2) > accx) {
      u1 = u2;
      c1 = c2;
      u2 *= 2.0;
      u = u2 / (1.0 + u2 * rb);
    }
    for (u = (c1 - mean) / (c2 - mean); u < 0.9;
         u = (c1 - mean) / (c2 - mean)) {
      u = 0.5 * (u1 + u2);
      double xconst = 0.0;
      if (errbd(u / (1.0 + u * rb), &xconst) > accx) {
        u1 = u;
        c1 = xconst;
      } else {
        u2 = u;
        c2 = xconst;
      }
    }
    *upn = u2;
    return c2;
  }

  // Bound on the integration error from truncating the integral at u.
  double truncation(double u, double tausq) const {
    double sum2 = (sigsq + tausq) * u * u;
    double prod1 = 2.0 * sum2;
    double prod2 = 0.0;
    double prod3 = 0.0;
    int s = 0;
    u *= 2.0;
    for (double lj : lb) {
      const double x = (u * lj) * (u * lj);
      if (x > 1.0) {
        prod2 += std::log(x);
        prod3 += log1(x, true);
        ++s;
      } else {
        prod1 += log1(x, true);
      }
    }
    prod2 += prod1;
    prod3 += prod1;
    const double x = exp1(-0.25 * prod2) / kPi;
    const double y = exp1(-0.25 * prod3) / kPi;
    double err1 = (s == 0) ? 1.0 : x * 2.0 / s;
    double err2 = (prod3 > 1.0) ? 2.5 * y : 1.0;
    if (err2 < err1) err1 = err2;
    const double half = 0.5 * sum2;
    err2 = (half <= y) ? 1.0 : y / half;
    return std::min(err1, err2);
  }

  // Shrink the integration cutoff as far as the truncation bound allows.
  void findu(double* utx, double accx) const {
    static const double divis[] = {2.0, 1.4, 1.2, 1.1};
    double ut = *utx;
    double u = 0.25 * ut;
    if (truncation(u, 0.0) > accx) {
      for (u = ut; truncation(u, 0.0) > accx; u = ut) ut *= 4.0;
    } else {
      ut = u;
      for (u *= 0.25; truncation(u, 0.0) <= accx; u *= 0.25) ut = u;
    }
    for (double div : divis) {
      u = ut / div;
      if (truncation(u, 0.0) <= accx) ut = u;
    }
    *utx = ut;
  }

  // Trapezoid sum of the inversion integrand at spacing interv; auxiliary
  // passes (mainx false) carry a convergence factor of variance tausq.
  void integrate(int nterm, double interv, double tausq, bool mainx) {
    const double inpi = interv / kPi;
    for (int k = nterm; k >= 0; --k) {
      const double u = (k + 0.5) * interv;
      double sum1 = -2.0 * u * c;
      double sum2 = std::abs(sum1);
      double sum3 = -0.5 * sigsq * u * u;
      for (double lj : lb) {
        const double x = 2.0 * lj * u;
        const double z = std::atan(x);
        sum3 -= 0.25 * log1(x * x, true);
        sum1 += z;
        sum2 += std::abs(z);
      }
      double x = inpi * exp1(sum3) / u;
      if (!mainx) {
        x *= 1.0 - exp1(-0.5 * tausq * u * u);
      }
      intl += std::sin(0.5 * sum1) * x;
      ersm += 0.5 * sum2 * x;
    }
  }

  // Coefficient of tausq in the error introduced by a convergence factor
  // centered at x.
  double cfe(double x) {
    double axl = std::abs(x);
    const double sxl = (x > 0.0) ? 1.0 : -1.0;
    double sum1 = 0.0;
    for (std::size_t j = lb.size(); j-- > 0;) {
      if (lb[j] * sxl > 0.0) {
        const double lj = std::abs(lb[j]);
        const double axl1 = axl - lj;
        const double axl2 = lj / kLn2Over8;
        if (axl1 > axl2) {
          axl = axl1;
        } else {
          if (axl > axl2) axl = axl2;
          sum1 = (axl - axl1) / lj + static_cast<double>(j);
          break;
        }
      }
    }
    if (sum1 > 100.0) {
      fail = true;
      return 1.0;
    }
    return std::pow(2.0, 0.25 * sum1) / (kPi * axl * axl);
  }
};

}  // namespace

DaviesResult davies_qf(std::span<const double> lambdas, double q, double acc,
                       int max_terms) {
  if (lambdas.empty()) {
    raise(ErrorCode::InvalidValue, "davies_qf: empty eigenvalue list");
  }

  Inverter iv;
  iv.lb.assign(lambdas.begin(), lambdas.end());
  std::sort(iv.lb.begin(), iv.lb.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  iv.c = q;
  iv.acc = acc;
  iv.xlim = static_cast<double>(max_terms);

  double sd = 0.0;
  for (double lj : iv.lb) {
    if (!std::isfinite(lj)) {
      raise(ErrorCode::InvalidValue, "davies_qf: non-finite eigenvalue");
    }
    iv.mean += lj;
    sd += 2.0 * lj * lj;
    iv.lmax = std::max(iv.lmax, lj);
    iv.lmin = std::min(iv.lmin, lj);
  }

  DaviesResult res;
  if (sd == 0.0) {
    res.p = (q <= 0.0) ? 1.0 : 0.0;
    return res;
  }
  iv.sd = std::sqrt(sd);
  const double almx = std::max(iv.lmax, -iv.lmin);

  double acc1 = acc;
  double utx = 16.0 / iv.sd;
  double up = 4.5 / iv.sd;
  double un = -up;
  iv.findu(&utx, 0.5 * acc1);

  // First convergence factor if the spread allows it.
  if (iv.c != 0.0 && almx > 0.07 * iv.sd) {
    const double tausq = 0.25 * acc1 / iv.cfe(iv.c);
    if (iv.fail) {
      iv.fail = false;
    } else if (iv.truncation(utx, tausq) < 0.2 * acc1) {
      iv.sigsq += tausq;
      iv.findu(&utx, 0.25 * acc1);
    }
  }
  acc1 *= 0.5;

  double qfval = -1.0;
  bool done = false;
  while (!done) {
    // Effective range of the distribution; bail out when q lies beyond it.
    const double d1 = iv.ctff(acc1, &up) - iv.c;
    if (d1 < 0.0) {
      qfval = 1.0;  // CDF; q above the upper cutoff
      done = true;
      break;
    }
    const double d2 = iv.c - iv.ctff(acc1, &un);
    if (d2 < 0.0) {
      qfval = 0.0;
      done = true;
      break;
    }

    const double intv = 2.0 * kPi / std::max(d1, d2);
    const double xnt = utx / intv;
    const double xntm = 3.0 / std::sqrt(acc1);
    if (xnt > xntm * 1.5) {
      // Main integration would need too many terms: run an auxiliary pass
      // with a convergence factor, then retry with the smoothed sum.
      if (xntm > iv.xlim) {
        res.fault = 1;
        res.p = -1.0;
        return res;
      }
      const int ntm = static_cast<int>(std::floor(xntm + 0.5));
      const double intv1 = utx / ntm;
      const double x = 2.0 * kPi / intv1;
      if (x <= std::abs(iv.c)) {
        // cannot smooth; fall through to the main pass
      } else {
        const double tausq =
            0.33 * acc1 / (1.1 * (iv.cfe(iv.c - x) + iv.cfe(iv.c + x)));
        if (!iv.fail) {
          acc1 *= 0.67;
          iv.integrate(ntm, intv1, tausq, false);
          iv.xlim -= xntm;
          iv.sigsq += tausq;
          iv.findu(&utx, 0.25 * acc1);
          acc1 *= 0.75;
          continue;  // recompute the range with the new sigsq
        }
        iv.fail = false;
      }
    }

    if (xnt > iv.xlim) {
      res.fault = 1;
      res.p = -1.0;
      return res;
    }
    const int nt = static_cast<int>(std::floor(xnt + 0.5));
    iv.integrate(nt, intv, 0.0, true);
    qfval = 0.5 - iv.intl;
    done = true;
  }

  // Round-off significance check against the accumulated |integrand| mass.
  res.abserr = iv.ersm;
  const double x = iv.ersm + 0.1 * acc;
  for (double rat : {1.0, 2.0, 4.0, 8.0}) {
    if (rat * x == rat * iv.ersm) {
      res.fault = 2;
    }
  }

  res.p = 1.0 - qfval;
  return res;
}

}  // namespace jase
