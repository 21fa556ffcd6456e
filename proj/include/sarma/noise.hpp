#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sarma {

enum class NoiseFamily { Gaussian, ParetoTail, LogPareto, Cauchy, TwoPoint, Deterministic };

/// I.i.d. innovation law with analytically declared moment and symmetry flags
/// and the exact tail function P(|Z| > x). Moment facts are derived from the
/// family, never estimated from samples: the existence theorems consume exact
/// moment statements and desk-scale sampling cannot certify tail moments.
///
/// Families:
///   Gaussian(sigma)   complex, independent N(0, sigma^2) real and imaginary parts
///   ParetoTail(a)     real, P(|Z| > x) = x^-a for x >= 1; optional symmetric sign
///   LogPareto(q)      real, P(|Z| > x) = (log x)^-q for x >= e; optional symmetric sign
///   Cauchy            real standard Cauchy
///   TwoPoint          +1 or -1 with probability 1/2
///   Deterministic(K)  the constant K
class NoiseSpec {
public:
    static NoiseSpec gaussian(double sigma = 1.0) {
        if (!(sigma > 0.0)) throw std::invalid_argument("NoiseSpec: gaussian sigma must be positive");
        NoiseSpec n(NoiseFamily::Gaussian, true);
        n.sigma_ = sigma;
        return n;
    }
    static NoiseSpec pareto(double a, bool symmetric) {
        if (!(a > 0.0)) throw std::invalid_argument("NoiseSpec: pareto exponent must be positive");
        NoiseSpec n(NoiseFamily::ParetoTail, symmetric);
        n.a_ = a;
        return n;
    }
    static NoiseSpec log_pareto(double q, bool symmetric) {
        if (!(q > 0.0)) throw std::invalid_argument("NoiseSpec: log-pareto exponent must be positive");
        NoiseSpec n(NoiseFamily::LogPareto, symmetric);
        n.q_ = q;
        return n;
    }
    static NoiseSpec cauchy() { return NoiseSpec(NoiseFamily::Cauchy, true); }
    static NoiseSpec two_point() { return NoiseSpec(NoiseFamily::TwoPoint, true); }
    static NoiseSpec deterministic(double k) {
        NoiseSpec n(NoiseFamily::Deterministic, k == 0.0);
        n.k_ = k;
        return n;
    }

    NoiseFamily family() const { return family_; }
    double sigma() const { return sigma_; }
    double pareto_exponent() const { return a_; }
    double log_pareto_exponent() const { return q_; }
    double constant() const { return k_; }

    bool symmetric() const { return symmetric_; }
    bool nondeterministic() const { return family_ != NoiseFamily::Deterministic; }
    bool complex_valued() const { return family_ == NoiseFamily::Gaussian; }

    bool finite_second_moment() const {
        switch (family_) {
            case NoiseFamily::Gaussian:
            case NoiseFamily::TwoPoint:
            case NoiseFamily::Deterministic: return true;
            case NoiseFamily::ParetoTail: return a_ > 2.0;
            default: return false;
        }
    }

    /// E|Z|^2 (infinity when the family has no second moment).
    double second_moment() const {
        switch (family_) {
            case NoiseFamily::Gaussian: return 2.0 * sigma_ * sigma_;
            case NoiseFamily::TwoPoint: return 1.0;
            case NoiseFamily::Deterministic: return k_ * k_;
            case NoiseFamily::ParetoTail: return a_ > 2.0 ? a_ / (a_ - 2.0) : HUGE_VAL;
            default: return HUGE_VAL;
        }
    }

    bool mean_zero() const {
        switch (family_) {
            case NoiseFamily::Gaussian:
            case NoiseFamily::TwoPoint: return true;
            case NoiseFamily::Deterministic: return k_ == 0.0;
            case NoiseFamily::ParetoTail: return symmetric_ && a_ > 1.0;
            default: return false;  // Cauchy and LogPareto have no mean
        }
    }

    /// E log_+^m |Z| < infty. Only the log-Pareto family loses log moments:
    /// log|Z| is Pareto(q) there, so the m-th moment is finite iff m < q.
    bool has_log_moment(int m) const {
        if (m < 1) throw std::invalid_argument("NoiseSpec: log-moment order must be >= 1");
        if (family_ == NoiseFamily::LogPareto) return static_cast<double>(m) < q_;
        return true;
    }

    /// Exact tail P(|Z| > x), x >= 0.
    double tail(double x) const {
        if (x < 0.0) throw std::domain_error("NoiseSpec::tail: negative threshold");
        switch (family_) {
            case NoiseFamily::Gaussian: return std::exp(-x * x / (2.0 * sigma_ * sigma_));
            case NoiseFamily::ParetoTail: return x < 1.0 ? 1.0 : std::pow(x, -a_);
            case NoiseFamily::LogPareto: return x < std::numbers::e ? 1.0 : std::pow(std::log(x), -q_);
            case NoiseFamily::Cauchy: return x == 0.0 ? 1.0 : 2.0 / std::numbers::pi * std::atan(1.0 / x);
            case NoiseFamily::TwoPoint: return x < 1.0 ? 1.0 : 0.0;
            case NoiseFamily::Deterministic: return x < std::abs(k_) ? 1.0 : 0.0;
        }
        return 0.0;
    }

    /// w^2 E[|Z|^2 1{|Z| < c/w}] for w > 0, evaluated in a scale that stays
    /// finite even when the raw truncated second moment overflows.
    double weighted_truncated_second_moment(double w, double c) const {
        if (!(w > 0.0) || !(c > 0.0))
            throw std::invalid_argument("NoiseSpec::weighted_truncated_second_moment: w and c must be positive");
        const double tau = c / w;
        switch (family_) {
            case NoiseFamily::Gaussian: {
                const double u = tau * tau / (2.0 * sigma_ * sigma_);
                const double factor = u > 700.0 ? 1.0 : 1.0 - std::exp(-u) * (1.0 + u);
                return w * w * 2.0 * sigma_ * sigma_ * factor;
            }
            case NoiseFamily::ParetoTail: {
                if (tau <= 1.0) return 0.0;
                if (a_ == 2.0) return w * w * 2.0 * std::log(tau);
                const double second = a_ / (2.0 - a_) * (std::pow(tau, 2.0 - a_) - 1.0);
                if (a_ > 2.0 && !(second < 1e300)) return w * w * a_ / (a_ - 2.0);
                return w * w * second;
            }
            case NoiseFamily::LogPareto: {
                // q c^2 int_1^L e^{2(u-L)} u^{-q-1} du with L = log tau.
                const double L = std::log(tau);
                if (L <= 1.0) return 0.0;
                const double lo = std::max(1.0, L - 40.0);
                const int steps = 4000;
                const double h = (L - lo) / steps;
                double sum = 0.0;
                for (int i = 0; i <= steps; ++i) {
                    const double u = lo + h * i;
                    const double g = std::exp(2.0 * (u - L)) * std::pow(u, -q_ - 1.0);
                    sum += (i == 0 || i == steps) ? 0.5 * g : g;
                }
                return q_ * c * c * sum * h;
            }
            case NoiseFamily::Cauchy:
                return 2.0 / std::numbers::pi * (w * c - w * w * std::atan(tau));
            case NoiseFamily::TwoPoint: return tau > 1.0 ? w * w : 0.0;
            case NoiseFamily::Deterministic: return tau > std::abs(k_) ? w * w * k_ * k_ : 0.0;
        }
        return 0.0;
    }

    std::string name() const {
        std::ostringstream os;
        switch (family_) {
            case NoiseFamily::Gaussian: os << "gaussian(sigma=" << sigma_ << ")"; break;
            case NoiseFamily::ParetoTail: os << "pareto(a=" << a_ << (symmetric_ ? ",symmetric" : "") << ")"; break;
            case NoiseFamily::LogPareto: os << "logpareto(q=" << q_ << (symmetric_ ? ",symmetric" : "") << ")"; break;
            case NoiseFamily::Cauchy: os << "cauchy"; break;
            case NoiseFamily::TwoPoint: os << "twopoint"; break;
            case NoiseFamily::Deterministic: os << "deterministic(" << k_ << ")"; break;
        }
        return os.str();
    }

    /// Parses "gaussian[:sigma]", "pareto:a[:sym]", "logpareto:q[:sym]",
    /// "cauchy", "twopoint", "deterministic:K".
    static NoiseSpec parse(const std::string& text) {
        std::vector<std::string> parts;
        std::string cur;
        for (char ch : text) {
            if (ch == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        parts.push_back(cur);
        const std::string& fam = parts[0];
        auto num = [&](std::size_t i, double dflt) {
            if (parts.size() <= i || parts[i].empty()) return dflt;
            return std::stod(parts[i]);
        };
        auto sym = [&](std::size_t i) { return parts.size() > i && (parts[i] == "sym" || parts[i] == "symmetric"); };
        if (fam == "gaussian") return gaussian(num(1, 1.0));
        if (fam == "pareto") return pareto(num(1, 3.0), sym(2));
        if (fam == "logpareto") return log_pareto(num(1, 1.5), sym(2));
        if (fam == "cauchy") return cauchy();
        if (fam == "twopoint") return two_point();
        if (fam == "deterministic") return deterministic(num(1, 0.0));
        throw std::invalid_argument("NoiseSpec: unknown noise family '" + fam + "'");
    }

private:
    NoiseSpec(NoiseFamily f, bool symmetric) : family_(f), symmetric_(symmetric) {}

    NoiseFamily family_;
    bool symmetric_;
    double sigma_ = 1.0;
    double a_ = 3.0;
    double q_ = 1.5;
    double k_ = 0.0;
};

}  // namespace sarma
