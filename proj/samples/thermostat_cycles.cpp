// Free-runs one air conditioner and one water heater and prints their duty
// cycles, switching periods and temperature envelopes.
#include <algorithm>
#include <cstdio>

#include "vbid/tcl.hpp"

using namespace vbid;

namespace {

template <class StepFn>
void run(const char* label, DeviceState st, double rated_kw, StepFn step) {
    const double dt_h = 1.0 / 3600.0;
    const double warmup_h = 4.0, measure_h = 8.0;
    for (double t = 0; t < warmup_h; t += dt_h) st = step(st, dt_h);

    double on_h = 0.0, lo = st.temperature, hi = st.temperature;
    std::size_t switches = 0;
    for (double t = 0; t < measure_h; t += dt_h) {
        DeviceState next = step(st, dt_h);
        if (next.power_draw != st.power_draw) ++switches;
        if (next.power_draw > 0.0) on_h += dt_h;
        lo = std::min(lo, next.temperature);
        hi = std::max(hi, next.temperature);
        st = next;
    }
    const double duty = on_h / measure_h;
    const double period_min = switches ? 2.0 * measure_h * 60.0 / double(switches) : 0.0;
    std::printf("%-14s duty %.3f  period %.1f min  band [%.2f, %.2f] degF  avg draw %.2f kW\n",
                label, duty, period_min, lo, hi, duty * rated_kw);
}

}  // namespace

int main() {
    AcParams ac;
    run("AC (cooling)", DeviceState{ac.T_set, 0.0}, ac.P,
        [&](DeviceState s, double dt) { return ac_step(s, ac, kDefaultAcAmbient, dt); });

    WhParams wh;
    run("WH (heating)", DeviceState{wh.T_set, 0.0}, wh.P_w, [&](DeviceState s, double dt) {
        return wh_step(s, wh, kDefaultWhAmbient, kDefaultWhFlow, dt);
    });
    return 0;
}
