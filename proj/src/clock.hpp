#ifndef SR6SFC_CLOCK_HPP
#define SR6SFC_CLOCK_HPP

#include <cassert>
#include <chrono>

namespace sr6 {

// Monotonic seconds source. Injected so that age-based cache throttling is
// deterministic under simulation.
class Clock {
public:
    virtual ~Clock() = default;
    virtual double now() const = 0;
};

class SimClock final : public Clock {
public:
    double now() const override { return t_; }
    void set(double t) {
        assert(t >= t_);
        t_ = t;
    }
    void advance(double dt) { set(t_ + dt); }

private:
    double t_ = 0.0;
};

class SteadyClock final : public Clock {
public:
    double now() const override {
        auto d = std::chrono::steady_clock::now().time_since_epoch();
        return std::chrono::duration<double>(d).count();
    }
};

}  // namespace sr6

#endif
