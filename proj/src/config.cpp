#include "rsme/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rsme {

std::string axis_name(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::Epsilon: return "epsilon";
    case SweepAxis::K: return "k";
    case SweepAxis::TailParam: return "tail_param";
    case SweepAxis::N: return "n";
    case SweepAxis::D: return "d";
    }
    return "none";
}

std::vector<std::string> estimator_names() {
    return {"stage_1", "full_filter", "full_mom", "coord_mom", "convex", "oracle"};
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

// Parsing context: where a value came from, for error messages.
struct Where {
    std::size_t line;
    std::string key;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("line " + std::to_string(line) + ": " + key + ": " + what);
    }
};

double to_double(const Where& at, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        at.fail("expected a number, got '" + text + "'");
    }
    return v;
}

std::uint64_t to_unsigned(const Where& at, const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        at.fail("expected a nonnegative integer, got '" + text + "'");
    }
    return v;
}

std::size_t to_positive(const Where& at, const std::string& text) {
    const auto v = to_unsigned(at, text);
    if (v == 0) {
        at.fail("must be positive");
    }
    return static_cast<std::size_t>(v);
}

std::vector<double> to_doubles(const Where& at, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        out.push_back(to_double(at, item));
    }
    return out;
}

std::vector<std::size_t> to_indices(const Where& at, const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) {
        out.push_back(static_cast<std::size_t>(to_unsigned(at, item)));
    }
    return out;
}

std::optional<std::size_t> to_iterations(const Where& at, const std::string& text) {
    if (text == "auto") {
        return std::nullopt;
    }
    return to_positive(at, text);
}

SubgroupRule to_rule(const Where& at, const std::string& text) {
    if (text == "practical") return SubgroupRule::practical();
    if (text == "theory") return SubgroupRule::theory();
    if (text.rfind("fixed:", 0) == 0) {
        return SubgroupRule::fixed(to_positive(at, text.substr(6)));
    }
    at.fail("expected practical, theory or fixed:<J>, got '" + text + "'");
}

EstimatorEntry make_estimator(const Where& at, const std::string& name) {
    if (name == "stage_1") return {name, estimator::Stage1Only{}, false};
    if (name == "full_filter") return {name, estimator::Full{dense::IterativeFilter{}}, true};
    if (name == "full_mom") return {name, estimator::Full{dense::CoordMoM{}}, true};
    if (name == "coord_mom") return {name, estimator::CoordMoMBaseline{}, false};
    if (name == "convex") return {name, estimator::ConvexBaseline{}, false};
    if (name == "oracle") return {name, estimator::Oracle{}, false};
    at.fail("unknown estimator '" + name + "'");
}

struct ParseState {
    bool convex_eta_set = false;
    bool convex_iterations_set = false;
    bool n_set = false;
    bool estimators_set = false;
};

void assign(ExperimentConfig& cfg, ParseState& st, const std::string& section, const std::string& key,
            const std::string& value, std::size_t line) {
    const Where at{line, section + "." + key};
    auto unknown = [&] { throw ConfigError("line " + std::to_string(line) + ": unknown key '" + at.key + "'"); };

    if (section == "distribution") {
        if (key == "family") {
            const auto f = parse_family(value);
            if (!f) at.fail("unknown family '" + value + "'");
            cfg.distribution.family = *f;
        } else if (key == "param") {
            cfg.distribution.param = to_double(at, value);
        } else {
            unknown();
        }
    } else if (section == "mean") {
        if (key == "dimension") cfg.mean.dimension = to_positive(at, value);
        else if (key == "values") cfg.mean.values = to_doubles(at, value);
        else if (key == "k") cfg.mean.k = static_cast<std::size_t>(to_unsigned(at, value));
        else if (key == "value") cfg.mean.fill_value = to_double(at, value);
        else unknown();
    } else if (section == "samples") {
        if (key == "n") {
            cfg.n = to_positive(at, value);
            st.n_set = true;
        } else if (key == "n_per_k") {
            cfg.n_per_k = to_positive(at, value);
        } else {
            unknown();
        }
    } else if (section == "contamination") {
        auto& c = cfg.contamination;
        if (key == "epsilon") c.epsilon = to_double(at, value);
        else if (key == "strategy") {
            if (value == "none") c.kind = ContaminationKind::None;
            else if (value == "constant_bias") c.kind = ContaminationKind::ConstantBias;
            else if (value == "heavy_tail") c.kind = ContaminationKind::HeavyTail;
            else if (value == "point_mass") c.kind = ContaminationKind::PointMass;
            else if (value == "lower_bound") c.kind = ContaminationKind::LowerBound;
            else at.fail("unknown strategy '" + value + "'");
        } else if (key == "shift") {
            if (value == "auto") c.shift.reset();
            else c.shift = to_double(at, value);
        } else if (key == "location") c.location = to_double(at, value);
        else if (key == "scale") c.scale = to_double(at, value);
        else if (key == "value") c.value = to_doubles(at, value);
        else if (key == "sigma") c.sigma = to_double(at, value);
        else if (key == "support_index") c.support_index = static_cast<std::size_t>(to_unsigned(at, value));
        else unknown();
    } else if (section == "estimators") {
        if (key != "list") unknown();
        cfg.estimators.clear();
        for (const auto& name : split_list(value)) {
            cfg.estimators.push_back(make_estimator(at, name));
        }
        st.estimators_set = true;
    } else if (section == "hyper") {
        if (key == "alpha") cfg.alpha = to_double(at, value);
        else if (key == "eta") cfg.eta = to_double(at, value);
        else if (key == "iterations_stage1") cfg.iterations_stage1 = to_iterations(at, value);
        else if (key == "iterations_full") cfg.iterations_full = to_iterations(at, value);
        else if (key == "iterations") cfg.iterations_stage1 = cfg.iterations_full = to_iterations(at, value);
        else if (key == "support_multiplier") cfg.support_multiplier = to_double(at, value);
        else if (key == "subgroup_rule") cfg.subgroup_rule = to_rule(at, value);
        else if (key == "convex_eta") {
            cfg.convex_eta = to_double(at, value);
            st.convex_eta_set = true;
        } else if (key == "convex_iterations") {
            cfg.convex_iterations = static_cast<std::size_t>(to_unsigned(at, value));
            st.convex_iterations_set = true;
        } else if (key == "filter_rounds") cfg.filter.max_rounds = to_positive(at, value);
        else if (key == "filter_quantile") {
            if (value == "auto") cfg.filter.score_quantile.reset();
            else cfg.filter.score_quantile = to_double(at, value);
        } else if (key == "filter_factor") cfg.filter.threshold_factor = to_double(at, value);
        else if (key == "filter_sigma2") {
            if (value == "known") cfg.filter_sigma2_source = ExperimentConfig::Sigma2Source::Known;
            else if (value == "estimate") cfg.filter_sigma2_source = ExperimentConfig::Sigma2Source::Estimate;
            else {
                cfg.filter_sigma2_source = ExperimentConfig::Sigma2Source::Value;
                cfg.filter_sigma2_value = to_double(at, value);
            }
        } else unknown();
    } else if (section == "sweep") {
        if (key == "axis") {
            if (value == "none") cfg.sweep_axis = SweepAxis::None;
            else if (value == "epsilon") cfg.sweep_axis = SweepAxis::Epsilon;
            else if (value == "k") cfg.sweep_axis = SweepAxis::K;
            else if (value == "tail_param") cfg.sweep_axis = SweepAxis::TailParam;
            else if (value == "n") cfg.sweep_axis = SweepAxis::N;
            else if (value == "d") cfg.sweep_axis = SweepAxis::D;
            else at.fail("unknown sweep axis '" + value + "'");
        } else if (key == "values") {
            cfg.sweep_values = to_doubles(at, value);
        } else {
            unknown();
        }
    } else if (section == "run") {
        if (key == "trials") cfg.trials = to_positive(at, value);
        else if (key == "base_seed") cfg.base_seed = to_unsigned(at, value);
        else if (key == "output") cfg.output_dir = value;
        else unknown();
    } else if (section == "trace") {
        if (key == "coordinates") cfg.trace_coordinates = to_indices(at, value);
        else if (key == "stride") cfg.trace_stride = to_positive(at, value);
        else if (key == "iterations") cfg.trace_iterations = static_cast<std::size_t>(to_unsigned(at, value));
        else unknown();
    } else if (section == "bench") {
        if (key == "d_values") cfg.bench_d_values = to_indices(at, value);
        else if (key == "repeats") cfg.bench_repeats = to_positive(at, value);
        else if (key == "backend") {
            if (value == "serial") cfg.bench_backend = Backend::Serial;
            else if (value == "parallel") cfg.bench_backend = Backend::Parallel;
            else at.fail("expected serial or parallel");
        } else unknown();
    } else {
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
    }
}

bool is_whole(double v) { return v >= 0.0 && std::floor(v) == v; }

void validate_config(ExperimentConfig& cfg, const ParseState& st) {
    if (cfg.estimators.empty()) {
        throw ConfigError(st.estimators_set ? "estimators.list: estimator list is empty"
                                            : "estimators.list: missing (no estimators configured)");
    }
    std::set<std::string> names;
    for (const auto& e : cfg.estimators) {
        if (!names.insert(e.name).second) {
            throw ConfigError("estimators.list: duplicate estimator '" + e.name + "'");
        }
    }
    if (cfg.sweep_axis == SweepAxis::None && !cfg.sweep_values.empty()) {
        throw ConfigError("sweep.values: given without a sweep axis");
    }
    if (cfg.sweep_axis != SweepAxis::None && cfg.sweep_values.empty()) {
        throw ConfigError("sweep.values: sweep list is empty");
    }
    if (cfg.sweep_axis == SweepAxis::K || cfg.sweep_axis == SweepAxis::N || cfg.sweep_axis == SweepAxis::D) {
        for (double v : cfg.sweep_values) {
            if (!is_whole(v)) {
                throw ConfigError("sweep.values: " + axis_name(cfg.sweep_axis) + " values must be whole numbers");
            }
        }
    }
    if (cfg.sweep_axis == SweepAxis::K && !cfg.mean.values.empty()) {
        throw ConfigError("mean.values: a k sweep needs the k/value form of the mean");
    }
    if (cfg.n_per_k) {
        if (st.n_set) {
            throw ConfigError("samples: give either n or n_per_k, not both");
        }
        cfg.n.reset();
    }
    if (!st.convex_eta_set) {
        cfg.convex_eta = cfg.eta;
    }
    if (!st.convex_iterations_set) {
        SubgmConfig probe{cfg.alpha, cfg.eta, cfg.iterations_stage1, 1.0, {}};
        if (cfg.alpha > 0.0 && cfg.eta > 0.0) {
            cfg.convex_iterations = probe.resolved_iterations();
        }
    }
    for (auto& e : cfg.estimators) {
        if (auto* cm = std::get_if<estimator::CoordMoMBaseline>(&e.kind)) cm->rule = cfg.subgroup_rule;
        if (auto* cv = std::get_if<estimator::ConvexBaseline>(&e.kind)) *cv = {cfg.convex_eta, cfg.convex_iterations};
        if (auto* f = std::get_if<estimator::Full>(&e.kind)) {
            if (std::holds_alternative<dense::CoordMoM>(f->dense)) f->dense = dense::CoordMoM{cfg.subgroup_rule};
            else f->dense = cfg.filter;
        }
    }
    try {
        validate(DenseEstimator{cfg.filter});
        for (std::size_t s = 0; s < cfg.sweep_points(); ++s) {
            const Scenario sc = materialize(cfg, s);
            for (std::size_t c : cfg.trace_coordinates) {
                if (c >= sc.mean.dimension) {
                    throw ConfigError("trace.coordinates: coordinate " + std::to_string(c) + " out of range");
                }
            }
        }
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    } catch (const ShapeError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    for (std::size_t i = 1; i < cfg.bench_d_values.size(); ++i) {
        if (cfg.bench_d_values[i] <= cfg.bench_d_values[i - 1]) {
            throw ConfigError("bench.d_values: must be strictly ascending");
        }
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    ParseState st;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        if (body.front() == '[') {
            if (body.back() != ']') {
                throw ConfigError("line " + std::to_string(line) + ": malformed section header");
            }
            section = trim(body.substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": key outside of any [section]");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": empty key");
        }
        assign(cfg, st, section, key, value, line);
    }
    validate_config(cfg, st);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

Scenario materialize(const ExperimentConfig& cfg, std::size_t sweep_index) {
    if (sweep_index >= cfg.sweep_points()) {
        throw ParameterError("materialize: sweep index out of range");
    }
    Scenario sc;
    sc.distribution = cfg.distribution;
    MeanConfig mean = cfg.mean;
    sc.epsilon = cfg.contamination.epsilon;
    std::optional<std::size_t> n = cfg.n;

    if (cfg.sweep_axis != SweepAxis::None) {
        const double v = cfg.sweep_values[sweep_index];
        sc.sweep_value = v;
        switch (cfg.sweep_axis) {
        case SweepAxis::Epsilon: sc.epsilon = v; break;
        case SweepAxis::K: mean.k = static_cast<std::size_t>(v); break;
        case SweepAxis::TailParam: sc.distribution.param = v; break;
        case SweepAxis::N: n = static_cast<std::size_t>(v); break;
        case SweepAxis::D: mean.dimension = static_cast<std::size_t>(v); break;
        case SweepAxis::None: break;
        }
    }
    sc.distribution.validate();
    sc.mean = mean.values.empty() ? SparseMeanSpec::leading(mean.dimension, mean.k, mean.fill_value)
                                  : SparseMeanSpec::leading(mean.dimension, mean.values);
    sc.n = n ? *n : *cfg.n_per_k * std::max<std::size_t>(sc.mean.sparsity(), 1);
    if (sc.n == 0) {
        throw ParameterError("sample size must be positive");
    }
    if (!(sc.epsilon >= 0.0 && sc.epsilon < 0.5)) {
        throw ParameterError("epsilon must lie in [0, 0.5)");
    }

    const auto& cc = cfg.contamination;
    const std::size_t d = sc.mean.dimension;
    auto sigma = [&]() -> double {
        if (cc.sigma) return *cc.sigma;
        const auto var = variance(sc.distribution);
        if (!var) {
            throw ParameterError("contamination: the inlier variance is infinite; set contamination.sigma or a numeric shift");
        }
        return std::sqrt(*var);
    };
    sc.contamination = {sc.epsilon, strategy::None{}};
    switch (cc.kind) {
    case ContaminationKind::None: break;
    case ContaminationKind::ConstantBias: {
        double shift = 0.0;
        if (cc.shift) shift = *cc.shift;
        else if (sc.epsilon > 0.0) shift = sigma() / std::sqrt(sc.epsilon);
        sc.contamination = make_constant_bias(sc.epsilon, dense_mean(sc.mean), shift);
        break;
    }
    case ContaminationKind::HeavyTail:
        if (!(cc.scale > 0.0)) throw ParameterError("contamination.scale must be positive");
        sc.contamination.strategy = strategy::HeavyTailOutliers{cc.location, cc.scale};
        break;
    case ContaminationKind::PointMass: {
        Vector value;
        if (cc.value.size() == 1) value.assign(d, cc.value.front());
        else if (cc.value.size() == d) value = cc.value;
        else throw ParameterError("contamination.value must have 1 or d entries");
        sc.contamination.strategy = strategy::PointMass{std::move(value)};
        break;
    }
    case ContaminationKind::LowerBound:
        if (sc.epsilon > 0.0) sc.contamination = make_lower_bound_adversary(sigma(), sc.epsilon, cc.support_index, d);
        break;
    }

    sc.stage1 = SubgmConfig{cfg.alpha, cfg.eta, cfg.iterations_stage1, cfg.support_multiplier, {}};
    sc.full = SubgmConfig{cfg.alpha, cfg.eta, cfg.iterations_full, cfg.support_multiplier, {}};
    sc.stage1.validate();
    sc.full.validate();

    switch (cfg.filter_sigma2_source) {
    case ExperimentConfig::Sigma2Source::Known: sc.filter_sigma2 = variance(sc.distribution); break;
    case ExperimentConfig::Sigma2Source::Estimate: sc.filter_sigma2.reset(); break;
    case ExperimentConfig::Sigma2Source::Value: sc.filter_sigma2 = cfg.filter_sigma2_value; break;
    }
    return sc;
}

EstimatorKind resolve_estimator(const EstimatorEntry& entry, const Scenario& scenario) {
    EstimatorKind kind = entry.kind;
    if (auto* f = std::get_if<estimator::Full>(&kind)) {
        if (auto* filt = std::get_if<dense::IterativeFilter>(&f->dense)) {
            filt->sigma2 = scenario.filter_sigma2;
        }
    }
    return kind;
}

} // namespace rsme
