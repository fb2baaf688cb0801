// Runs the whole identification pipeline in-process at desk scale:
// simulate -> train-sae -> train-forecaster -> identify -> report.
#include <cstdio>
#include <filesystem>

#include "vbid/pipeline.hpp"

using namespace vbid;

int main(int argc, char** argv) {
    const std::string out = argc > 1 ? argv[1] : "end_to_end_out";
    RunConfig cfg;
    cfg.seed = 7;
    cfg.ensemble.device_count = 10;
    cfg.signals.count = 3;
    cfg.signals.horizon_s = 900.0;
    cfg.sae.epochs = 120;
    cfg.forecaster.stage1_epochs = 30;
    cfg.forecaster.stage2_epochs = 15;

    SimulateResult sim = run_simulate(cfg, out);
    std::printf("simulate: %zu rows, baseline %.2f kW\n", sim.dataset.m.rows, sim.baseline_kw);

    SaeTrainResult sae = run_train_sae(cfg, out);
    std::printf("train-sae: final loss %.6g after %zu epochs\n", sae.loss_history.back(),
                sae.loss_history.size());

    ForecasterTrainResult fc = run_train_forecaster(cfg, out);
    std::printf("train-forecaster: stage1 %.6g -> stage2 %.6g\n", fc.stage1.final_loss(),
                fc.stage2.final_loss());

    IdentifyResult id = run_identify(cfg, out);
    std::printf("phi: a=%.4g 1/h  C=[%.4g, %.4g] kWh  x0=%.4g kWh  P=[%.4g, %.4g] kW\n",
                id.phi.a, id.phi.C1, id.phi.C2, id.phi.x0, id.phi.P_minus, id.phi.P_plus);

    run_report(cfg, out);
    std::printf("artifacts in %s\n", std::filesystem::absolute(out).c_str());
    return 0;
}
