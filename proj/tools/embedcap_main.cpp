// embedcap: embedding capacity of renewal traffic under a causal bounded-delay
// matching constraint. Subcommands: capacity | sweep | order | matrix | trace.
// All CSV goes to stdout (or --output), diagnostics and errors to stderr.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "embedcap/capacity.hpp"
#include "embedcap/format.hpp"
#include "embedcap/models.hpp"
#include "embedcap/ordering.hpp"
#include "embedcap/traces.hpp"

namespace {

using namespace embedcap;

constexpr std::uint64_t kDefaultSeed = 12345;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("EMBEDCAP_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return kDefaultSeed;
}

[[noreturn]] void fail(const std::string& msg) {
    throw CLI::ValidationError(msg);
}

double parse_param(const std::string& spec, const std::string& body,
                   const std::string& expected_key) {
    const auto eq = body.find('=');
    const std::string key = eq == std::string::npos ? body : body.substr(0, eq);
    if (eq == std::string::npos || key != expected_key) {
        fail("model '" + spec + "': expected parameter '" + expected_key + "=<value>'");
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(body.substr(eq + 1), &used);
        if (used != body.size() - eq - 1) throw std::invalid_argument(body);
        return v;
    } catch (const std::exception&) {
        fail("model '" + spec + "': cannot parse value for parameter '" + expected_key + "'");
    }
}

// grammar: family[:k1=v1[,k2=v2]][@rate]
InterarrivalModel parse_model(const std::string& spec) {
    std::string body = spec;
    double rate = 1.0;
    if (const auto at = body.find('@'); at != std::string::npos) {
        try {
            std::size_t used = 0;
            rate = std::stod(body.substr(at + 1), &used);
            if (used != body.size() - at - 1) throw std::invalid_argument(body);
        } catch (const std::exception&) {
            fail("model '" + spec + "': cannot parse rate");
        }
        body = body.substr(0, at);
    }
    std::string family = body, params;
    if (const auto colon = body.find(':'); colon != std::string::npos) {
        family = body.substr(0, colon);
        params = body.substr(colon + 1);
    }
    try {
        if (family == "exponential" || family == "exp") {
            if (!params.empty()) fail("model '" + spec + "': exponential takes no parameter");
            return InterarrivalModel::exponential(rate);
        }
        if (family == "gamma") {
            return InterarrivalModel::gamma(parse_param(spec, params, "xi"), rate);
        }
        if (family == "erlang") {
            const double xi = parse_param(spec, params, "xi");
            if (xi != static_cast<int>(xi)) fail("model '" + spec + "': erlang xi must be an integer");
            return InterarrivalModel::erlang(static_cast<int>(xi), rate);
        }
        if (family == "weibull") {
            return InterarrivalModel::weibull(parse_param(spec, params, "b"), rate);
        }
        if (family == "uniform") {
            if (!params.empty()) fail("model '" + spec + "': uniform takes no parameter");
            return InterarrivalModel::uniform(rate);
        }
        if (family == "pareto") {
            return InterarrivalModel::pareto(parse_param(spec, params, "b"), rate);
        }
        if (family == "lognormal") {
            return InterarrivalModel::lognormal(parse_param(spec, params, "sigma"), rate);
        }
        if (family == "shifted-exponential" || family == "shifted_exponential" ||
            family == "sexp") {
            return InterarrivalModel::shifted_exponential(parse_param(spec, params, "a"), rate);
        }
    } catch (const CLI::ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        fail("model '" + spec + "': " + e.what());
    }
    fail("model '" + spec + "': unknown family '" + family + "'");
}

struct Method {
    enum class Kind { Zero, Linear, McChain, McBgm } kind = Kind::Zero;
    int order = 1;
    std::uint64_t samples = 0;
    std::string label;
};

Method parse_method(const std::string& text) {
    Method m;
    std::string head = text, arg;
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        head = text.substr(0, colon);
        arg = text.substr(colon + 1);
    }
    if (head == "zero") {
        if (!arg.empty()) fail("method 'zero' takes no argument");
        m.kind = Method::Kind::Zero;
        m.label = "zero";
        return m;
    }
    if (head == "linear") {
        m.kind = Method::Kind::Linear;
        m.order = arg.empty() ? 1 : static_cast<int>(std::strtol(arg.c_str(), nullptr, 10));
        if (m.order < 1) fail("method 'linear:N' requires N >= 1");
        m.label = "linear:" + std::to_string(m.order);
        return m;
    }
    if (head == "mc-chain" || head == "mc-bgm") {
        if (arg.empty()) fail("method '" + head + ":count' requires a count");
        const double v = std::strtod(arg.c_str(), nullptr);
        if (!(v >= 1.0)) fail("method '" + head + "': bad count '" + arg + "'");
        m.kind = head == "mc-chain" ? Method::Kind::McChain : Method::Kind::McBgm;
        m.samples = static_cast<std::uint64_t>(v);
        m.label = head + ":" + std::to_string(m.samples);
        return m;
    }
    fail("unknown method '" + text + "' (use zero | linear:N | mc-chain:steps | mc-bgm:points)");
}

CapacityEstimate run_method(const InterarrivalModel& model, double delta,
                            const Method& m, std::uint64_t seed) {
    switch (m.kind) {
        case Method::Kind::Zero:
            try {
                return capacity_zero_order(model, delta);
            } catch (const SeriesDivergenceError&) {
                return capacity_zero_order(model, delta, MPath::Numeric);
            }
        case Method::Kind::Linear:
            try {
                return capacity_linear(model, delta, m.order);
            } catch (const SeriesDivergenceError&) {
                return capacity_linear(model, delta, m.order, MPath::Numeric);
            }
        case Method::Kind::McChain:
            return capacity_mc_chain(model, delta, m.samples, seed);
        case Method::Kind::McBgm:
            return capacity_mc_bgm(model, delta, m.samples, seed);
    }
    throw std::logic_error("unreachable");
}

void print_row(std::ostream& os, double delta, const Method& m,
               const CapacityEstimate& est) {
    os << format_csv_number(delta) << ',' << m.label << ','
       << format_csv_number(est.value);
    if (est.std_error) os << ',' << format_csv_number(*est.std_error);
    os << '\n';
}

std::vector<double> parse_delta_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) fail("empty delta list");
    return out;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"embedding capacity of renewal traffic under bounded-delay matching"};
    app.require_subcommand(1);

    std::string model_spec, model2_spec, methods_csv = "zero", output_path;
    double delta = 0.0, lambda = 0.0, big_delta = 0.0;
    double delta_min = 0.0, delta_max = 0.0;
    int points = 0, order_n = 1, column = 1;
    bool log_spacing = false, do_scramble = false;
    std::uint64_t seed = default_seed();
    std::string source_path, relay_path, deltas_csv = "0.25,0.5,1,2,4";
    std::size_t tranche_n = 10000;
    double observation_limit = 9000.0;

    auto* cap = app.add_subcommand("capacity", "single capacity value as a CSV row");
    cap->add_option("--model", model_spec, "model spec, e.g. erlang:xi=2")->required();
    auto* opt_delta = cap->add_option("--delta", delta, "normalized delay (= lambda*Delta)");
    auto* opt_lambda = cap->add_option("--lambda", lambda, "arrival rate");
    auto* opt_big = cap->add_option("--Delta", big_delta, "delay bound (with --lambda)");
    cap->add_option("--method", methods_csv,
                    "zero | linear:N | mc-chain:steps | mc-bgm:points");
    cap->add_option("--seed", seed, "RNG seed (default $EMBEDCAP_SEED or 12345)");
    cap->add_option("--output", output_path, "write CSV here instead of stdout");

    auto* sweep = app.add_subcommand("sweep", "capacity over a delta grid");
    sweep->add_option("--model", model_spec)->required();
    sweep->add_option("--delta-min", delta_min)->required();
    sweep->add_option("--delta-max", delta_max)->required();
    sweep->add_option("--points", points)->required();
    sweep->add_flag("--log", log_spacing, "log-spaced grid");
    sweep->add_option("--methods", methods_csv, "comma list of methods");
    sweep->add_option("--seed", seed);
    sweep->add_option("--output", output_path);

    auto* ord = app.add_subcommand("order", "convex-order verdict and capacity relation");
    ord->add_option("--model1", model_spec)->required();
    ord->add_option("--model2", model2_spec)->required();

    auto* mat = app.add_subcommand("matrix", "dump system matrix entries h,k,value");
    mat->add_option("--model", model_spec)->required();
    mat->add_option("--delta", delta)->required();
    mat->add_option("--order", order_n, "system order N (default 1)");
    mat->add_option("--output", output_path);

    auto* tra = app.add_subcommand("trace", "real-trace pipeline: tranche selection, "
                                            "Weibull fit, capacity error table");
    tra->add_option("--source", source_path, "source trace file")->required();
    tra->add_option("--relay", relay_path, "relay trace file")->required();
    tra->add_option("--n", tranche_n, "tranche size in packets (default 10000)");
    tra->add_option("--column", column, "timestamp column, 1-based (default 1)");
    tra->add_option("--deltas", deltas_csv, "comma list of normalized delays");
    tra->add_flag("--scramble", do_scramble, "permute interarrivals before matching");
    tra->add_option("--seed", seed);
    tra->add_option("--observation-limit", observation_limit,
                    "dimensionless matching horizon (default 9000)");
    tra->add_option("--output", output_path);

    CLI11_PARSE(app, argc, argv);

    try {
        std::ofstream file;
        if (cap->parsed()) {
            const bool have_delta = opt_delta->count() > 0;
            const bool have_pair = opt_lambda->count() > 0 && opt_big->count() > 0;
            if (have_delta == have_pair) {
                throw CLI::ValidationError(
                    "give exactly one of --delta or the pair --lambda/--Delta");
            }
            const double d = have_delta ? delta : lambda * big_delta;
            if (!(d > 0.0)) throw CLI::ValidationError("normalized delay must be > 0");
            const InterarrivalModel model = parse_model(model_spec);
            const Method m = parse_method(methods_csv);
            auto& os = open_output(file, output_path);
            print_row(os, d, m, run_method(model, d, m, seed));
        } else if (sweep->parsed()) {
            if (!(delta_min > 0.0) || !(delta_max > delta_min)) {
                throw CLI::ValidationError("need 0 < --delta-min < --delta-max");
            }
            if (points < 2) throw CLI::ValidationError("--points must be >= 2");
            const InterarrivalModel model = parse_model(model_spec);
            std::vector<Method> methods;
            std::stringstream ss(methods_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (!tok.empty()) methods.push_back(parse_method(tok));
            }
            if (methods.empty()) throw CLI::ValidationError("--methods is empty");
            auto& os = open_output(file, output_path);
            for (int i = 0; i < points; ++i) {
                const double f = static_cast<double>(i) / (points - 1);
                const double d = log_spacing
                                     ? delta_min * std::pow(delta_max / delta_min, f)
                                     : delta_min + (delta_max - delta_min) * f;
                for (const Method& m : methods) {
                    print_row(os, d, m, run_method(model, d, m, seed));
                }
            }
        } else if (ord->parsed()) {
            const InterarrivalModel m1 = parse_model(model_spec);
            const InterarrivalModel m2 = parse_model(model2_spec);
            const auto v12 = convex_order_check(m1, m2);
            const auto v21 = convex_order_check(m2, m1);
            const bool less = v12.relation == OrderingRelation::LessVariable;
            const bool more = v21.relation == OrderingRelation::LessVariable;
            std::string verdict, relation;
            if (less && more) {
                verdict = "equal";
                relation = "C1=C2";
            } else if (less) {
                verdict = "less_variable";
                relation = "C1>=C2";
            } else if (more) {
                verdict = "more_variable";
                relation = "C1<=C2";
            } else {
                verdict = "incomparable";
                switch (predict_capacity_order(m1, m2)) {
                    case CapacityOrder::FirstAtLeastSecond: relation = "C1>=C2"; break;
                    case CapacityOrder::FirstAtMostSecond: relation = "C1<=C2"; break;
                    case CapacityOrder::Unknown: relation = "unknown"; break;
                }
            }
            std::cout << verdict << ',' << relation << '\n';
        } else if (mat->parsed()) {
            if (!(delta > 0.0)) throw CLI::ValidationError("--delta must be > 0");
            if (order_n < 1) throw CLI::ValidationError("--order must be >= 1");
            const InterarrivalModel model = parse_model(model_spec);
            SystemMatrix A = [&] {
                try {
                    return build_system_matrix(model, delta, order_n);
                } catch (const SeriesDivergenceError&) {
                    return build_system_matrix(model, delta, order_n, MPath::Numeric);
                }
            }();
            auto& os = open_output(file, output_path);
            for (int h = -A.order; h <= A.order; ++h) {
                for (int k = -A.order; k <= A.order; ++k) {
                    os << h << ',' << k << ',' << format_csv_number(A.at(h, k)) << '\n';
                }
            }
        } else if (tra->parsed()) {
            const Trace source = parse_trace(source_path, column);
            const Trace relay = parse_trace(relay_path, column);
            TranchePair pair = select_tranches(source, relay, tranche_n);
            if (do_scramble) {
                RngState rng(seed);
                pair = scramble(pair, rng);
            }
            const WeibullFit fit = fit_weibull_union(pair);
            std::cerr << "fitted weibull shape b=" << format_csv_number(fit.shape)
                      << (fit.at_upper_bound ? " (at search bound)" : "") << '\n';
            const auto deltas = parse_delta_list(deltas_csv);
            const auto rows =
                capacity_error_table(pair, deltas, observation_limit, fit.shape);
            auto& os = open_output(file, output_path);
            write_capacity_error_csv(os, rows);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
