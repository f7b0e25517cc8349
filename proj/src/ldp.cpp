#include "vcsim/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "vcsim/error.hpp"
#include "vcsim/rng.hpp"

namespace vcsim {

namespace {

constexpr std::uint64_t kBlockSize = 8192;
constexpr double kMaxPoissonMean = 700.0;

void require_positive(double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, ErrorKind::domain, std::string(name) + " must be positive");
}

void require_stable(double lambda, double Lambda) {
    require_positive(lambda, "lambda");
    require_positive(Lambda, "Lambda");
    require(lambda > Lambda, ErrorKind::stability,
            "stability requires lambda > Lambda");
}

void require_epsilon(double epsilon) {
    require(epsilon > 0.0 && epsilon <= 1.0, ErrorKind::domain, "epsilon must lie in (0, 1]");
}

template <class F>
double golden_max(F f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Inverse-CDF Poisson draw; bit-identical on every platform.
class PoissonSampler {
public:
    explicit PoissonSampler(double mean) {
        require(mean >= 0.0 && mean <= kMaxPoissonMean, ErrorKind::domain,
                "Poisson mean must lie in [0, 700]");
        double p = std::exp(-mean);
        double cdf = p;
        for (std::uint32_t k = 0; cdf < 1.0 - 1e-16 && k < 100000; ++k) {
            cdf_.push_back(cdf);
            p *= mean / static_cast<double>(k + 1);
            cdf += p;
        }
        cdf_.push_back(1.0);
    }

    std::int64_t operator()(Engine& eng) const {
        const double u = uniform01(eng);
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::int64_t>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

} // namespace

double theta_star(double x, double lambda, double Lambda) {
    require_positive(x, "x");
    require_positive(lambda, "lambda");
    require_positive(Lambda, "Lambda");
    return std::log((x + std::sqrt(x * x + 4.0 * lambda * Lambda)) / (2.0 * Lambda));
}

double cumulant_objective(double theta, double x, double lambda, double Lambda) {
    return theta * x - Lambda * std::expm1(theta) - lambda * std::expm1(-theta);
}

double legendre(double x, double lambda, double Lambda) {
    const double th = theta_star(x, lambda, Lambda);
    const double root = std::sqrt(x * x + 4.0 * lambda * Lambda);
    const double v = x * th - (x + root) / 2.0 - 2.0 * Lambda * lambda / (x + root) + lambda + Lambda;
    return std::max(v, 0.0);
}

double legendre_numeric(double x, double lambda, double Lambda) {
    require_positive(x, "x");
    require_positive(lambda, "lambda");
    require_positive(Lambda, "Lambda");
    auto g = [&](double th) { return cumulant_objective(th, x, lambda, Lambda); };
    const double th = golden_max(g, -20.0, 20.0, 1e-10);
    return g(th);
}

double rate_function(double b, double lambda, double Lambda) {
    require_stable(lambda, Lambda);
    require(b >= 0.0, ErrorKind::domain, "b must be nonnegative");
    return b * std::log(lambda / Lambda);
}

RateMinimum rate_function_numeric(double b, double lambda, double Lambda) {
    require_stable(lambda, Lambda);
    require(b >= 0.0, ErrorKind::domain, "b must be nonnegative");
    if (b == 0.0) return {0.0, 0.0, true};

    auto h = [&](double t) { return t * legendre_numeric(b / t, lambda, Lambda); };
    // Log grid over six decades around b, independent of the closed-form minimiser.
    constexpr int kGrid = 2400;
    const double lo = std::log(b * 1e-3), hi = std::log(b * 1e3);
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int g = 0; g <= kGrid; ++g) {
        const double t = std::exp(lo + (hi - lo) * g / kGrid);
        const double v = h(t);
        if (v < best_v) {
            best_v = v;
            best = g;
        }
    }
    const double a = std::exp(lo + (hi - lo) * std::max(best - 1, 0) / kGrid);
    const double c = std::exp(lo + (hi - lo) * std::min(best + 1, kGrid) / kGrid);
    const double t = golden_max([&](double s) { return -h(s); }, a, c, 1e-10 * c);
    RateMinimum out;
    out.argmin = t;
    out.value = std::min(h(t), best_v);
    out.below_two = t < 2.0;
    return out;
}

double effective_valve(double epsilon, double lambda, double Lambda) {
    require_stable(lambda, Lambda);
    require_epsilon(epsilon);
    return -std::log(epsilon) / std::log(lambda / Lambda);
}

double effective_merit(double epsilon, double Lambda, double L) {
    require_positive(Lambda, "Lambda");
    require(std::isfinite(L) && L > 0.0, ErrorKind::domain, "L must be positive");
    require_epsilon(epsilon);
    return Lambda * std::exp(-std::log(epsilon) / L);
}

std::vector<McEstimate> mc_failure_rates(double lambda, double Lambda,
                                         std::span<const double> levels, const McOptions& opt) {
    require_stable(lambda, Lambda);
    require(opt.horizon >= 1 && opt.replicas >= 1, ErrorKind::domain,
            "horizon and replicas must be at least 1");
    require(!levels.empty(), ErrorKind::domain, "at least one level is required");
    for (double v : levels) require(std::isfinite(v), ErrorKind::domain, "levels must be finite");

    // sup Q > L for integer-valued Q is sup Q >= floor(L) + 1.
    std::vector<std::int64_t> thresholds;
    for (double v : levels) thresholds.push_back(static_cast<std::int64_t>(std::floor(v)) + 1);
    const std::int64_t top = *std::max_element(thresholds.begin(), thresholds.end());
    const std::int64_t bottom = *std::min_element(thresholds.begin(), thresholds.end());

    // Once the walk sits this far below every open threshold, the chance of
    // climbing back is below (Lambda/lambda)^margin < 1e-12.
    const auto margin =
        static_cast<std::int64_t>(std::ceil(std::log(1e12) / std::log(lambda / Lambda)));

    const PoissonSampler sel(Lambda), mer(lambda);
    const std::uint64_t blocks = (opt.replicas + kBlockSize - 1) / kBlockSize;
    // Per block, the histogram of per-replica maxima clipped to [bottom - 1, top].
    const auto width = static_cast<std::size_t>(top - bottom + 2);
    std::vector<std::vector<std::uint64_t>> hist(blocks, std::vector<std::uint64_t>(width, 0));

    auto run_block = [&](std::uint64_t blk) {
        const std::uint64_t first = blk * kBlockSize;
        const std::uint64_t last = std::min(opt.replicas, first + kBlockSize);
        auto& hb = hist[blk];
        for (std::uint64_t r = first; r < last; ++r) {
            // One stream per replica, so a replica's path ignores the level set.
            auto eng = make_stream(opt.seed, "mc", r);
            std::int64_t q = 0, best = 0;
            for (std::uint64_t t = 2; t <= opt.horizon; ++t) {
                q += sel(eng) - mer(eng);
                best = std::max(best, q);
                if (best >= top) break;
                if (q + margin < std::max(best + 1, bottom)) break;
            }
            const auto clipped = std::clamp(best, bottom - 1, top);
            ++hb[static_cast<std::size_t>(clipped - (bottom - 1))];
        }
    };

    const unsigned jobs = std::max(1u, opt.jobs);
    if (jobs == 1 || blocks == 1) {
        for (std::uint64_t blk = 0; blk < blocks; ++blk) run_block(blk);
    } else {
        std::vector<std::thread> pool;
        const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(jobs, blocks));
        for (unsigned w = 0; w < n; ++w)
            pool.emplace_back([&, w] {
                for (std::uint64_t blk = w; blk < blocks; blk += n) run_block(blk);
            });
        for (auto& th : pool) th.join();
    }

    // Fixed reduction order over blocks.
    std::vector<std::uint64_t> total(width, 0);
    for (const auto& hb : hist)
        for (std::size_t s = 0; s < width; ++s) total[s] += hb[s];

    std::vector<McEstimate> out;
    const double n = static_cast<double>(opt.replicas);
    for (auto thr : thresholds) {
        std::uint64_t hits = 0;
        for (std::size_t s = 0; s < width; ++s)
            if (static_cast<std::int64_t>(s) + bottom - 1 >= thr) hits += total[s];
        McEstimate e;
        e.replicas = opt.replicas;
        e.horizon = opt.horizon;
        e.hits = hits;
        e.probability = static_cast<double>(hits) / n;
        e.stderr_ = std::sqrt(e.probability * (1.0 - e.probability) / n);
        out.push_back(e);
    }
    return out;
}

McEstimate mc_failure_rate(double lambda, double Lambda, double L, const McOptions& opt) {
    const double levels[] = {L};
    return mc_failure_rates(lambda, Lambda, levels, opt).front();
}

DecayFit verify_decay(double lambda, double Lambda, double b, std::span<const double> l_values,
                      const McOptions& opt) {
    require_stable(lambda, Lambda);
    require(b > 0.0, ErrorKind::domain, "b must be positive");
    require(l_values.size() >= 2, ErrorKind::domain, "at least two l values are required");
    for (std::size_t i = 1; i < l_values.size(); ++i)
        require(l_values[i] > l_values[i - 1], ErrorKind::domain, "l values must increase");

    DecayFit fit;
    fit.l_values.assign(l_values.begin(), l_values.end());
    std::vector<double> levels;
    for (double l : l_values) levels.push_back(l * b);
    fit.estimates = mc_failure_rates(lambda, Lambda, levels, opt);
    for (std::size_t i = 0; i < levels.size(); ++i)
        require(fit.estimates[i].hits > 0, ErrorKind::insufficient_replicas,
                "no replica exceeded level " + std::to_string(levels[i]) +
                    "; raise --replicas");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double x = l_values[i];
        const double y = std::log(fit.estimates[i].probability);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.expected = -rate_function(b, lambda, Lambda);
    return fit;
}

} // namespace vcsim
