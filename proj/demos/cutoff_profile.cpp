// Small end-to-end demo: sweep beta across the cutoff window for the
// averaging model and print the measured distance next to the Gaussian
// profile 2 Phi(-beta (1+r)/sqrt(1+r^2)).

#include <cstdio>

#include "excut/excut.hpp"

int main() {
    using namespace excut;
    const auto law = RedistributionLaw::point_half();
    const auto k = law.entropic_constants();
    const int n = 1024;
    const auto sched = schedule(n, k);
    std::printf("n=%d  t_ent=%.1f  t_w=%.1f  (h=%.4f, r=%.4f)\n", n, sched.t_ent, sched.t_w,
                k.h, k.r);
    std::printf("%8s %10s %12s %12s\n", "beta", "t", "measured", "limit");
    const Seeder seeder{7, stream_ns::replica};
    std::vector<double> betas{-2.0, -1.0, 0.0, 1.0, 2.0};
    std::vector<std::uint64_t> ts;
    for (double b : betas) ts.push_back(profile_time(sched, b));
    const auto curve = distance_curve(ModelKind::GAM, law, n, ts, 0, 400, seeder,
                                      Metric::Plain, 0);
    for (std::size_t i = 0; i < betas.size(); ++i)
        std::printf("%8.1f %10llu %12.4f %12.4f\n", betas[i],
                    (unsigned long long)ts[i], curve[i].value, theorem_profile(betas[i], k));
    return 0;
}
