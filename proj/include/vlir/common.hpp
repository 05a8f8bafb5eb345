#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace vlir {

// Bad parameters, malformed configs, infeasible inputs. CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Enumeration budget exceeded. CLI exit code 3. The message names the
// limiting parameter and, where one exists, the cheaper fallback.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Neumaier compensated summation. Route-agreement tolerances are 1e-12 on
// sums with up to ~2^22 terms; plain accumulation drifts past that.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double log_base(unsigned k, double x) {
    return std::log(x) / std::log(static_cast<double>(k));
}

// floor() that snaps to the nearest integer first when within 1e-9
// (relative): products like n*a*R that are mathematically integral can land
// at 6.999999999999999 and must not lose a whole unit.
inline long long floor_tol(double x) {
    double r = std::nearbyint(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)))
        return static_cast<long long>(r);
    return static_cast<long long>(std::floor(x));
}

// k^e saturating at uint64 max; `saturated` reports overflow.
inline uint64_t pow_saturating(uint64_t k, uint64_t e, bool* saturated = nullptr) {
    if (saturated) *saturated = false;
    uint64_t r = 1;
    for (uint64_t i = 0; i < e; ++i) {
        if (r > UINT64_MAX / k) {
            if (saturated) *saturated = true;
            return UINT64_MAX;
        }
        r *= k;
    }
    return r;
}

// Deterministic RNG: mt19937_64 plus explicit bit-to-double conversion, so
// results are identical across standard libraries (std::uniform_real_distribution
// is not pinned by the standard).
class SeededRng {
  public:
    explicit SeededRng(uint64_t seed) : eng_(seed) {}

    uint64_t raw() { return eng_(); }

    // uniform in [0,1)
    double unit_co() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform in (0,1]
    double unit_oc() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }

    // unbiased uniform integer in [0, n)
    uint64_t below(uint64_t n) {
        if (n == 0) throw ConfigError("SeededRng::below: n must be positive");
        uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
        uint64_t v;
        do {
            v = eng_();
        } while (v > limit);
        return v % n;
    }

    // standard exponential, strictly positive
    double exp1() { return -std::log(unit_oc()); }

  private:
    std::mt19937_64 eng_;
};

} // namespace vlir
