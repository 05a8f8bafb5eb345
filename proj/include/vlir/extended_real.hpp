#pragma once

#include <cmath>
#include <stdexcept>

namespace vlir {

// A finite double or +infinity, never NaN. Suprema over the feasible class
// can be unbounded, so infinity is a first-class value, not a sentinel.
class ExtendedReal {
  public:
    ExtendedReal() = default;

    static ExtendedReal finite(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("ExtendedReal::finite: value is not finite");
        return ExtendedReal(v, false);
    }
    static ExtendedReal infinity() { return ExtendedReal(0.0, true); }

    // Adopts +inf doubles as the infinite value; rejects NaN and -inf.
    static ExtendedReal of(double v) {
        if (std::isnan(v)) throw std::invalid_argument("ExtendedReal::of: NaN");
        if (std::isinf(v)) {
            if (v < 0) throw std::invalid_argument("ExtendedReal::of: -inf");
            return infinity();
        }
        return finite(v);
    }

    bool is_infinite() const { return inf_; }

    double value() const {
        if (inf_) throw std::logic_error("ExtendedReal::value: infinite");
        return v_;
    }

    // +inf double when infinite; convenient for comparisons and bindings.
    double as_double() const { return inf_ ? std::numeric_limits<double>::infinity() : v_; }

    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
        return a.v_ == b.v_;
    }
    friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.v_ < b.v_;
    }

  private:
    ExtendedReal(double v, bool inf) : v_(v), inf_(inf) {}
    double v_ = 0.0;
    bool inf_ = false;
};

} // namespace vlir
