#include "doctest.h"

#include <filesystem>
#include <string>

#include "rsme/config.hpp"

using namespace rsme;

namespace {

const char* kMinimal = R"(
[estimators]
list = stage_1
)";

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("defaults") {
    const auto cfg = parse_config(kMinimal);
    CHECK(cfg.alpha == 1e-5);
    CHECK(cfg.eta == 0.05);
    CHECK(cfg.subgroup_rule.kind == SubgroupRule::Kind::Practical);
    CHECK(cfg.iterations_stage1 == 600u);
    CHECK(cfg.iterations_full == 200u);
    CHECK(cfg.distribution.family == Family::Fisk);
    CHECK(cfg.distribution.param == 3.1);
    CHECK(cfg.n == 600u);
    CHECK(cfg.trials == 1);
    CHECK(cfg.convex_eta == cfg.eta);
    CHECK(cfg.convex_iterations == 600);
    CHECK(cfg.estimators.size() == 1);
    CHECK(cfg.estimators[0].name == "stage_1");
}

TEST_CASE("the estimator list is required and non-empty") {
    CHECK(error_of("[estimators]\nlist =\n").find("estimators.list") != std::string::npos);
    CHECK(error_of("[run]\ntrials = 2\n").find("estimators.list") != std::string::npos);
    CHECK(error_of("[estimators]\nlist = oracle, oracle\n").find("duplicate") != std::string::npos);
    CHECK(error_of("[estimators]\nlist = lasso\n").find("unknown estimator") != std::string::npos);
}

TEST_CASE("planned runs are sweep points x trials x estimators") {
    const auto cfg = parse_config(R"(
[estimators]
list = stage_1, oracle
[sweep]
axis = epsilon
values = 0.05, 0.1
[run]
trials = 3
)");
    CHECK(cfg.planned_runs() == 12);
    CHECK(cfg.sweep_points() == 2);
    CHECK(materialize(cfg, 1).epsilon == 0.1);
}

TEST_CASE("errors carry line and key context") {
    const std::string bad_number = error_of("[estimators]\nlist = stage_1\n[hyper]\neta = fast\n");
    CHECK(bad_number.find("line 4") != std::string::npos);
    CHECK(bad_number.find("eta") != std::string::npos);

    CHECK(error_of("[hyper]\nlearning_rate = 0.1\n[estimators]\nlist = stage_1\n").find("line 2") != std::string::npos);
    CHECK(error_of("[bogus]\nx = 1\n").find("[bogus]") != std::string::npos);
    CHECK(error_of("x = 1\n").find("outside") != std::string::npos);
    CHECK(error_of("[hyper\n").find("malformed") != std::string::npos);
    CHECK(error_of("[hyper]\nalpha\n").find("key = value") != std::string::npos);
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[run]\ntrials = 0\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[hyper]\niterations = 0\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[sweep]\naxis = epsilon\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[sweep]\nvalues = 1, 2\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[sweep]\naxis = k\nvalues = 1.5\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[contamination]\nepsilon = 0.5\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[distribution]\nfamily = cauchy\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[distribution]\nfamily = lognormal\nparam = 0.5\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[trace]\ncoordinates = 100\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[bench]\nd_values = 10, 5\n").empty());
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[samples]\nn = 10\nn_per_k = 5\n").empty());
    // infinite variance with an automatic shift has no scale to use
    CHECK_FALSE(error_of("[estimators]\nlist = stage_1\n[distribution]\nfamily = student_t\nparam = 1.5\n"
                         "[contamination]\nstrategy = constant_bias\n").empty());
}

TEST_CASE("comments, whitespace and the iteration keys") {
    const auto cfg = parse_config(R"(
# leading comment
[hyper]   # trailing comment
  iterations = 321
  alpha = 1e-8
  subgroup_rule = fixed:40
  support_multiplier = 2
[estimators]
list = stage_1 , convex,full_mom
)");
    CHECK(cfg.iterations_stage1 == 321u);
    CHECK(cfg.iterations_full == 321u);
    CHECK(cfg.alpha == 1e-8);
    CHECK(cfg.subgroup_rule.kind == SubgroupRule::Kind::Fixed);
    CHECK(cfg.subgroup_rule.fixed_count == 40);
    CHECK(cfg.estimators.size() == 3);
    CHECK(cfg.convex_iterations == 321);
    const auto& convex = std::get<estimator::ConvexBaseline>(cfg.estimators[1].kind);
    CHECK(convex.iterations == 321);
    const auto& full = std::get<estimator::Full>(cfg.estimators[2].kind);
    CHECK(std::get<dense::CoordMoM>(full.dense).rule.fixed_count == 40);
    CHECK(cfg.estimators[2].uses_full_iterations);

    const auto automatic = parse_config("[estimators]\nlist = stage_1\n[hyper]\niterations_stage1 = auto\n");
    CHECK_FALSE(automatic.iterations_stage1.has_value());
    CHECK(materialize(automatic, 0).stage1.resolved_iterations() == 461);
}

TEST_CASE("materialize resolves every sweep axis") {
    const auto k_sweep = parse_config(R"(
[mean]
dimension = 50
k = 4
value = 2
[samples]
n_per_k = 100
[estimators]
list = stage_1
[sweep]
axis = k
values = 4, 8
)");
    const auto s1 = materialize(k_sweep, 1);
    CHECK(s1.mean.sparsity() == 8);
    CHECK(s1.n == 800);
    CHECK(s1.sweep_value == 8.0);
    CHECK_THROWS_AS(materialize(k_sweep, 2), ParameterError);

    const auto tail = parse_config("[estimators]\nlist = stage_1\n[distribution]\nfamily = student_t\n"
                                   "[sweep]\naxis = tail_param\nvalues = 2.5, 3\n");
    CHECK(materialize(tail, 0).distribution.param == 2.5);

    const auto n_sweep = parse_config("[estimators]\nlist = stage_1\n[sweep]\naxis = n\nvalues = 300\n");
    CHECK(materialize(n_sweep, 0).n == 300);
    const auto d_sweep = parse_config("[estimators]\nlist = stage_1\n[mean]\nk = 2\n[sweep]\naxis = d\nvalues = 30\n");
    CHECK(materialize(d_sweep, 0).mean.dimension == 30);
}

TEST_CASE("contamination settings") {
    const auto bias = parse_config(R"(
[distribution]
family = gaussian
param = 4
[mean]
dimension = 3
values = 1
[contamination]
epsilon = 0.25
strategy = constant_bias
[estimators]
list = stage_1
)");
    const auto sc = materialize(bias, 0);
    const auto& cb = std::get<strategy::ConstantBias>(sc.contamination.strategy);
    CHECK(cb.center == Vector{1, 0, 0});
    CHECK(cb.shift == Vector(3, 4.0)); // sigma / sqrt(eps) = 2 / 0.5

    const auto lb = parse_config("[estimators]\nlist = stage_1\n[distribution]\nfamily = gaussian\nparam = 1\n"
                                 "[contamination]\nstrategy = lower_bound\nepsilon = 0.04\nsupport_index = 2\n");
    CHECK(std::get<strategy::PointMass>(materialize(lb, 0).contamination.strategy).value[2] == doctest::Approx(5.0));

    const auto pm = parse_config("[estimators]\nlist = stage_1\n[mean]\ndimension = 2\nvalues = 1\n"
                                 "[contamination]\nstrategy = point_mass\nvalue = 7\n");
    CHECK(std::get<strategy::PointMass>(materialize(pm, 0).contamination.strategy).value == Vector{7, 7});

    const auto ht = parse_config("[estimators]\nlist = stage_1\n[contamination]\nstrategy = heavy_tail\nlocation = 3\n");
    CHECK(std::get<strategy::HeavyTailOutliers>(materialize(ht, 0).contamination.strategy).location == 3.0);
}

TEST_CASE("filter sigma2 source") {
    const auto known = parse_config("[estimators]\nlist = full_filter\n[distribution]\nfamily = gaussian\nparam = 2\n");
    const auto sc = materialize(known, 0);
    CHECK(sc.filter_sigma2 == 2.0);
    const auto kind = resolve_estimator(known.estimators[0], sc);
    CHECK(std::get<dense::IterativeFilter>(std::get<estimator::Full>(kind).dense).sigma2 == 2.0);

    const auto est = parse_config("[estimators]\nlist = full_filter\n[hyper]\nfilter_sigma2 = estimate\n");
    CHECK_FALSE(materialize(est, 0).filter_sigma2.has_value());
    const auto value = parse_config("[estimators]\nlist = full_filter\n[hyper]\nfilter_sigma2 = 0.7\n");
    CHECK(materialize(value, 0).filter_sigma2 == 0.7);
    // infinite variance: "known" falls back to estimating
    const auto heavy = parse_config("[estimators]\nlist = full_filter\n[distribution]\nfamily = student_t\nparam = 1.5\n");
    CHECK_FALSE(materialize(heavy, 0).filter_sigma2.has_value());
}

TEST_CASE("shipped configs validate") {
    for (const auto& entry : std::filesystem::directory_iterator(RSME_CONFIG_DIR)) {
        if (entry.path().extension() != ".cfg") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_config(entry.path().string()));
    }
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}
