// Copyright 2026 The compass-coherence Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "compass/analytic.h"
#include "compass/code.h"
#include "compass/code_io.h"
#include "compass/decoder.h"
#include "compass/errors.h"
#include "compass/exact_backend.h"
#include "compass/experiments.h"
#include "compass/sweep_io.h"
#include "compass/version.h"
#include "json.hpp"

namespace compass::cli {

namespace {

using ojson = nlohmann::ordered_json;

// Raised for bad flag values and combinations; maps to the usage exit code.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void write_error(std::ostream &err, const std::string &code, const std::string &message) {
    ojson j;
    j["code"] = code;
    j["message"] = message;
    err << j.dump() << std::endl;
}

ojson meta_for(const std::string &command, const ojson &config) {
    ojson meta;
    meta["tool"] = kToolName;
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["config"] = config;
    return meta;
}

std::vector<std::string> split_list(const std::string &text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double to_double(const std::string &s, const std::string &what) {
    size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used != s.size() || !std::isfinite(x)) {
        throw UsageError("bad number '" + s + "' in " + what);
    }
    return x;
}

size_t to_size(const std::string &s, const std::string &what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw UsageError("bad integer '" + s + "' in " + what);
    }
    return std::stoull(s);
}

std::vector<size_t> parse_sizes(const std::string &text, const std::string &what) {
    std::vector<size_t> out;
    for (const auto &item : split_list(text)) {
        out.push_back(to_size(item, what));
    }
    if (out.empty()) {
        throw UsageError(what + " is empty");
    }
    return out;
}

std::vector<double> parse_doubles(const std::string &text, const std::string &what) {
    std::vector<double> out;
    for (const auto &item : split_list(text)) {
        out.push_back(to_double(item, what));
    }
    if (out.empty()) {
        throw UsageError(what + " is empty");
    }
    return out;
}

/// "A:B:STEP" (inclusive of B) or a comma list, in units of pi.
std::vector<double> parse_thetas(const std::string &text) {
    if (text.find(':') == std::string::npos) {
        return parse_doubles(text, "--thetas");
    }
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        throw UsageError("--thetas expects A:B:STEP");
    }
    double a = to_double(parts[0], "--thetas"), b = to_double(parts[1], "--thetas");
    double step = to_double(parts[2], "--thetas");
    if (!(step > 0.0) || b < a) {
        throw UsageError("--thetas needs STEP > 0 and B >= A");
    }
    std::vector<double> out;
    for (long k = 0;; k++) {
        double t = a + static_cast<double>(k) * step;
        if (t > b + 1e-9 * step) {
            break;
        }
        // Snap to 12 decimals so that 0.1:0.3:0.1 yields 0.3, not 0.30000000000000004.
        out.push_back(std::round(t * 1e12) / 1e12);
        if (out.size() > 100000) {
            throw UsageError("--thetas grid is too large");
        }
    }
    return out;
}

std::string json_scalar_token(const nlohmann::json &v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_array()) {
        std::string joined;
        for (const auto &x : v) {
            joined += (joined.empty() ? "" : ",") + json_scalar_token(x);
        }
        return joined;
    }
    return v.dump();
}

const std::set<std::string> &command_words() {
    static const std::set<std::string> words{"code", "gen", "validate", "decode", "channel", "exact",
                                             "analytic", "sweep", "threshold", "interpolate"};
    return words;
}

/// Expands --config FILE into flag tokens placed right after the subcommand
/// words, so that flags given on the command line (which come later) win.
std::vector<std::string> inject_config(const std::vector<std::string> &args) {
    std::optional<std::string> path;
    std::vector<std::string> rest;
    for (size_t i = 0; i < args.size(); i++) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                throw UsageError("--config needs a file name");
            }
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path) {
        return rest;
    }
    std::ifstream in(*path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + *path + "'");
    }
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw UsageError("config file '" + *path + "' must hold a JSON object of flags");
    }
    std::vector<std::string> injected;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string key = it.key();
        if (key.rfind("--", 0) != 0) {
            key = "--" + key;
        }
        if (it->is_boolean()) {
            if (it->get<bool>()) {
                injected.push_back(key);
            }
            continue;
        }
        if (it->is_null() || it->is_object()) {
            throw UsageError("config value for '" + it.key() + "' must be a scalar or a list");
        }
        injected.push_back(key);
        injected.push_back(json_scalar_token(*it));
    }
    size_t at = 0;
    while (at < rest.size() && command_words().count(rest[at])) {
        at++;
    }
    rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
    return rest;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

ojson number_or_text(double x) {
    if (std::isnan(x)) {
        return nullptr;
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    return x;
}

ojson channel_json(const LogicalPTM &ptm) {
    ojson j;
    j["epsilon"] = ptm.epsilon;
    j["delta"] = ptm.delta;
    j["kappa"] = number_or_text(kappa(ptm));
    j["r1"] = r1(ptm);
    return j;
}

ojson threshold_json(const ThresholdEstimate &est) {
    ojson j;
    j["metric"] = to_string(est.metric);
    j["lower"] = number_or_text(est.lower);
    j["upper"] = number_or_text(est.upper);
    j["one_sided"] = est.one_sided;
    j["regime_lower"] = number_or_text(est.regime_lower);
    j["regime_upper"] = number_or_text(est.regime_upper);
    ojson pairs = ojson::array();
    for (const auto &p : est.pairs) {
        ojson pj;
        pj["d_low"] = p.d_low;
        pj["d_high"] = p.d_high;
        pj["crossings"] = ojson::array();
        for (const auto &c : p.crossings) {
            pj["crossings"].push_back(
                {{"lower", c.lower}, {"upper", c.upper}, {"refined", c.refined}, {"direction", c.direction}});
        }
        pairs.push_back(pj);
    }
    j["pairs"] = pairs;
    return j;
}

void require_given(const CLI::Option *opt, const std::string &message) {
    if (opt->count() == 0) {
        throw UsageError(message);
    }
}

void forbid(const CLI::Option *opt, const std::string &message) {
    if (opt->count() > 0) {
        throw UsageError(message);
    }
}

struct Options {
    size_t jobs = 0;

    // code gen
    std::string family;
    size_t dx = 0, dz = 0, h = 0, l = 0;
    double q_shor = 0.5;
    uint64_t seed = 0;
    std::string out;

    // shared
    std::string code_path;
    std::string syndrome;
    bool oracle = false;
    bool json = false;
    double theta_over_pi = 0.0;
    std::string recovery = "minweight";
    std::string dump;

    // sweep / threshold / interpolate
    std::string thetas;
    std::string distances;
    std::string backend;
    size_t codes = 1;
    size_t samples = 0;
    std::string in;
    std::string metric = "r1";
    bool no_refine = false;
    std::string q_shors = "0,0.25,0.5,0.75,1";
    std::string d_list = "3,5";
};

class Cli {
   public:
    Cli(std::ostream &out) : out_(out), app_("Compass codes under uniform coherent Z rotation.", "compass") {
        app_.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        // No -h shortcut: --h is the block height.
        app_.set_help_flag("--help", "Print this help message and exit");
        app_.require_subcommand(1);
        app_.set_version_flag("--version", std::string(kVersion));
        app_.add_option("--jobs", o_.jobs, "Worker threads; 0 uses every core")->capture_default_str();
        app_.add_option("--config", config_path_,
                        "JSON file of flags for the chosen command, e.g. {\"theta-over-pi\": 0.2}; "
                        "flags on the command line take precedence");
        app_.footer("Angles are always given as theta/pi. Exit codes: 0 ok, 1 usage error, 2 computation failure.");
        build_code_commands();
        build_decode();
        build_channel_commands();
        build_sweep();
        build_threshold();
        build_interpolate();
    }

    int parse_and_run(std::vector<std::string> args) {
        std::reverse(args.begin(), args.end());
        try {
            app_.parse(args);
        } catch (const CLI::CallForHelp &e) {
            return app_.exit(e, out_, out_);
        } catch (const CLI::CallForAllHelp &e) {
            return app_.exit(e, out_, out_);
        } catch (const CLI::CallForVersion &e) {
            out_ << kToolName << " " << kVersion << "\n";
            return kExitOk;
        } catch (const CLI::ParseError &e) {
            throw UsageError(e.what());
        }
        action_();
        return kExitOk;
    }

   private:
    void build_code_commands() {
        auto *code = app_.add_subcommand("code", "Generate or validate compass-code files");
        code->require_subcommand(1);
        code->fallthrough();

        auto *gen = code->add_subcommand("gen", "Write the coloring of a named family or a random code");
        gen->fallthrough();
        gen->add_option("--family", o_.family, "zshor | xshor | rsc | zstacked | random")
            ->required()
            ->check(CLI::IsMember({"zshor", "xshor", "rsc", "zstacked", "random"}));
        auto *dx = gen->add_option("--dx", o_.dx, "Qubit rows d_x");
        auto *dz = gen->add_option("--dz", o_.dz, "Qubit columns d_z (odd)");
        auto *h = gen->add_option("--h", o_.h, "Block height, zstacked only");
        auto *q = gen->add_option("--q-shor", o_.q_shor, "XCut probability per cell, random only");
        auto *seed = gen->add_option("--seed", o_.seed, "64-bit seed, random only");
        gen->add_option("--out", o_.out, "Output file; stdout when omitted");
        gen->callback([=, this] {
            action_ = [=, this] {
                const std::string &f = o_.family;
                if (f != "zstacked") forbid(h, "--h applies to --family zstacked only");
                if (f != "random") {
                    forbid(q, "--q-shor applies to --family random only");
                    forbid(seed, "--seed applies to --family random only");
                }
                Coloring coloring;
                ojson config;
                config["family"] = f;
                if (f == "rsc" || f == "zstacked") {
                    if (dx->count() && dz->count() && o_.dx != o_.dz) {
                        throw UsageError("--family " + f + " is square; --dx and --dz must agree");
                    }
                    size_t l = dx->count() ? o_.dx : o_.dz;
                    if (!dx->count() && !dz->count()) throw UsageError("--dx or --dz is required");
                    config["dx"] = l;
                    config["dz"] = l;
                    if (f == "zstacked") {
                        require_given(h, "--family zstacked needs --h");
                        config["h"] = o_.h;
                        coloring = family_z_stacked(l, o_.h);
                    } else {
                        coloring = family_rotated_surface(l);
                    }
                } else {
                    require_given(dx, "--dx is required");
                    require_given(dz, "--dz is required");
                    config["dx"] = o_.dx;
                    config["dz"] = o_.dz;
                    if (f == "zshor") {
                        coloring = family_z_shor(o_.dx, o_.dz);
                    } else if (f == "xshor") {
                        coloring = family_x_shor(o_.dx, o_.dz);
                    } else {
                        config["q_shor"] = o_.q_shor;
                        config["seed"] = o_.seed;
                        coloring = random_coloring(o_.dx, o_.dz, o_.q_shor, o_.seed);
                    }
                }
                ojson meta = meta_for("code gen", config);
                meta["q_shor_realized"] = coloring.xcut_fraction();
                std::string text = coloring_to_json(coloring, meta);
                if (o_.out.empty()) {
                    out_ << text;
                } else {
                    write_text(o_.out, text);
                }
            };
        });

        auto *val = code->add_subcommand("validate", "Check every structural invariant of a code file");
        val->fallthrough();
        val->add_option("file", o_.code_path, "Code file")->required();
        val->callback([this] {
            action_ = [this] {
                Coloring coloring = load_coloring(o_.code_path);
                auto code = build_code(coloring);
                auto report = validate(code);
                ojson j;
                j["meta"] = meta_for("code validate", {{"file", o_.code_path}});
                j["ok"] = report.ok();
                j["n"] = code.num_qubits();
                j["x_stabilizers"] = code.x_stabilizers.size();
                j["z_stabilizers"] = code.z_stabilizers.size();
                j["q_shor_realized"] = coloring.xcut_fraction();
                j["checks"] = ojson::array();
                for (const auto &c : report.checks) {
                    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
                }
                out_ << j.dump(2) << "\n";
                if (!report.ok()) {
                    throw std::runtime_error("code failed validation");
                }
            };
        });
    }

    void build_decode() {
        auto *dec = app_.add_subcommand("decode", "Minimum-weight Z correction for an X syndrome");
        dec->fallthrough();
        dec->add_option("--code", o_.code_path, "Code file")->required();
        dec->add_option("--syndrome", o_.syndrome, "Syndrome bits, one per X stabilizer")->required();
        dec->add_flag("--oracle", o_.oracle, "Use exhaustive search instead of matching");
        dec->add_flag("--json", o_.json, "Print JSON with metadata instead of the bare bit-string");
        dec->callback([this] {
            action_ = [this] {
                auto code = build_code(load_coloring(o_.code_path));
                auto s = Syndrome::from_str(o_.syndrome);
                if (s.size() != code.x_stabilizers.size()) {
                    throw UsageError("--syndrome needs " + std::to_string(code.x_stabilizers.size()) + " bits");
                }
                auto corr = o_.oracle ? decode_bruteforce(code, s) : decode_mwpm(build_matching_graph(code), s);
                if (!o_.json) {
                    out_ << corr.support.str() << "\n";
                    return;
                }
                ojson j;
                j["meta"] = meta_for("decode", {{"code", o_.code_path}, {"syndrome", o_.syndrome}, {"oracle", o_.oracle}});
                j["correction"] = corr.support.str();
                j["weight"] = corr.weight();
                out_ << j.dump() << "\n";
            };
        });
    }

    void build_channel_commands() {
        auto *ch = app_.add_subcommand("channel", "Logical channel of a code at one angle");
        ch->require_subcommand(1);
        ch->fallthrough();

        auto *ex = ch->add_subcommand("exact", "Exact enumeration over all 2^n Z strings (n <= 25)");
        ex->fallthrough();
        ex->add_option("--code", o_.code_path, "Code file")->required();
        ex->add_option("--theta-over-pi", o_.theta_over_pi, "Physical angle / pi")->required();
        ex->add_option("--recovery", o_.recovery, "minweight | ml")
            ->check(CLI::IsMember({"minweight", "ml"}))
            ->capture_default_str();
        ex->add_option("--dump-distribution", o_.dump, "Write [{syndrome, p, theta_s}] to this JSON file");
        ex->callback([this] {
            action_ = [this] {
                auto code = build_code(load_coloring(o_.code_path));
                double theta = o_.theta_over_pi * std::numbers::pi;
                Recovery rec = parse_recovery(o_.recovery);
                ojson config{{"code", o_.code_path},
                             {"theta_over_pi", o_.theta_over_pi},
                             {"recovery", o_.recovery}};
                ojson j;
                j["meta"] = meta_for("channel exact", config);
                if (o_.dump.empty()) {
                    double t[] = {theta};
                    auto s = exact_summaries(code, t, rec, o_.jobs)[0];
                    auto body = channel_json(s.ptm);
                    j.update(body);
                    j["diamond"] = s.diamond;
                    j["total_probability"] = s.total_probability;
                } else {
                    auto dist = syndrome_distribution(code, theta, rec, o_.jobs);
                    j.update(channel_json(channel_of(dist)));
                    j["diamond"] = diamond_avg(dist);
                    j["total_probability"] = dist.total_probability();
                    ojson entries = ojson::array();
                    for (const auto &e : dist.entries) {
                        entries.push_back({{"syndrome", e.syndrome.str()}, {"p", e.probability}, {"theta_s", e.theta_s}});
                    }
                    write_text(o_.dump, entries.dump() + "\n");
                }
                out_ << j.dump() << "\n";
            };
        });

        auto *an = ch->add_subcommand("analytic", "Closed-form channel of a repetition-based family");
        an->fallthrough();
        an->add_option("--family", o_.family, "rep | zshor | xshor | zstacked")
            ->required()
            ->check(CLI::IsMember({"rep", "zshor", "xshor", "zstacked"}));
        auto *l = an->add_option("--l", o_.l, "Length (rep, zstacked) or square size (zshor, xshor)");
        auto *dx = an->add_option("--dx", o_.dx, "Qubit rows (zshor, xshor)");
        auto *dz = an->add_option("--dz", o_.dz, "Qubit columns (rep, zshor, xshor)");
        auto *h = an->add_option("--h", o_.h, "Block height, zstacked only");
        an->add_option("--theta-over-pi", o_.theta_over_pi, "Physical angle / pi")->required();
        an->add_option("--recovery", o_.recovery, "minweight | ml (ml for rep and zshor only)")
            ->check(CLI::IsMember({"minweight", "ml"}))
            ->capture_default_str();
        an->callback([=, this] {
            action_ = [=, this] {
                const std::string &f = o_.family;
                if (f != "zstacked") forbid(h, "--h applies to --family zstacked only");
                ojson config{{"family", f}};
                FamilySpec spec;
                spec.recovery = parse_recovery(o_.recovery);
                if (f == "rep") {
                    forbid(dx, "--dx does not apply to --family rep");
                    if (l->count() && dz->count() && o_.l != o_.dz) throw UsageError("--l and --dz disagree");
                    if (!l->count() && !dz->count()) throw UsageError("--family rep needs --l");
                    size_t len = l->count() ? o_.l : o_.dz;
                    config["l"] = len;
                    spec.kind = RepetitionFamily{len};
                } else if (f == "zstacked") {
                    forbid(dx, "--family zstacked is square; use --l");
                    forbid(dz, "--family zstacked is square; use --l");
                    require_given(l, "--family zstacked needs --l");
                    require_given(h, "--family zstacked needs --h");
                    config["l"] = o_.l;
                    config["h"] = o_.h;
                    spec.kind = ZStackedFamily{o_.l, o_.h};
                } else {
                    size_t rows = dx->count() ? o_.dx : o_.l;
                    size_t cols = dz->count() ? o_.dz : o_.l;
                    if (rows == 0 || cols == 0) throw UsageError("--family " + f + " needs --l or --dx and --dz");
                    if (l->count() && ((dx->count() && o_.dx != o_.l) || (dz->count() && o_.dz != o_.l))) {
                        throw UsageError("--l conflicts with --dx/--dz");
                    }
                    config["dx"] = rows;
                    config["dz"] = cols;
                    if (f == "zshor") {
                        spec.kind = ZShorFamily{rows, cols};
                    } else {
                        spec.kind = XShorFamily{rows, cols};
                    }
                }
                config["theta_over_pi"] = o_.theta_over_pi;
                config["recovery"] = o_.recovery;
                auto ptm = family_channel(spec, o_.theta_over_pi * std::numbers::pi);
                ojson j = channel_json(ptm);
                j["meta"] = meta_for("channel analytic", config);
                out_ << j.dump() << "\n";
            };
        });
    }

    void build_sweep() {
        auto *sw = app_.add_subcommand("sweep", "Metric table over a theta grid and a list of distances");
        sw->fallthrough();
        sw->add_option("--family", o_.family, "rep | zshor | xshor | zstacked | rsc | random")
            ->required()
            ->check(CLI::IsMember({"rep", "zshor", "xshor", "zstacked", "rsc", "random"}));
        sw->add_option("--thetas", o_.thetas, "Grid A:B:STEP or a comma list, in units of pi")->required();
        sw->add_option("--distances", o_.distances, "Comma list of distances (d_z; also d_x unless --dx)")->required();
        auto *backend = sw->add_option("--backend", o_.backend, "analytic | exact (default: analytic when available)")
                            ->check(CLI::IsMember({"analytic", "exact"}));
        auto *h = sw->add_option("--h", o_.h, "Block height, zstacked only");
        auto *dx = sw->add_option("--dx", o_.dx, "Fixed d_x for zshor and xshor");
        sw->add_option("--recovery", o_.recovery, "minweight | ml")
            ->check(CLI::IsMember({"minweight", "ml"}))
            ->capture_default_str();
        auto *q = sw->add_option("--q-shor", o_.q_shor, "XCut probability, random only");
        auto *codes = sw->add_option("--codes", o_.codes, "Random codes per point, random only");
        auto *samples = sw->add_option("--samples", o_.samples, "Syndrome draws per code (0 = exact), random only");
        auto *seed = sw->add_option("--seed", o_.seed, "64-bit seed, random only");
        sw->add_option("--out", o_.out, "Output file (.csv or .json); CSV on stdout when omitted");
        sw->callback([=, this] {
            action_ = [=, this] {
                SweepSource src;
                src.family = parse_source_family(o_.family);
                if (src.family != SourceFamily::ZStacked) forbid(h, "--h applies to --family zstacked only");
                if (src.family != SourceFamily::Random) {
                    for (auto *opt : {q, codes, samples, seed}) {
                        forbid(opt, opt->get_name() + " applies to --family random only");
                    }
                }
                if (src.family != SourceFamily::ZShor && src.family != SourceFamily::XShor) {
                    forbid(dx, "--dx applies to --family zshor and xshor only");
                }
                bool closed = src.family != SourceFamily::RotatedSurface && src.family != SourceFamily::Random;
                src.backend = backend->count() ? parse_backend(o_.backend) : (closed ? Backend::Analytic : Backend::Exact);
                src.recovery = parse_recovery(o_.recovery);
                src.h = o_.h;
                src.d_x = o_.dx;
                if (src.family == SourceFamily::ZStacked) require_given(h, "--family zstacked needs --h");
                if (src.family == SourceFamily::Random) {
                    src.q_shor = o_.q_shor;
                    src.n_codes = o_.codes;
                    src.n_samples = o_.samples;
                    src.seed = o_.seed;
                }
                src.check();
                auto thetas = parse_thetas(o_.thetas);
                auto ds = parse_sizes(o_.distances, "--distances");
                SweepTable table = sweep(src, thetas, ds, o_.jobs);
                ojson config{{"family", o_.family},
                             {"thetas", o_.thetas},
                             {"distances", o_.distances},
                             {"backend", to_string(src.backend)},
                             {"recovery", o_.recovery},
                             {"h", o_.h},
                             {"dx", o_.dx},
                             {"q_shor", src.q_shor},
                             {"codes", src.n_codes},
                             {"samples", src.n_samples},
                             {"seed", src.seed}};
                table.meta["command"] = "sweep";
                table.meta["config"] = config;
                emit_table(table);
            };
        });
    }

    void build_threshold() {
        auto *th = app_.add_subcommand("threshold", "Crossing-based threshold bounds from a sweep file");
        th->fallthrough();
        th->add_option("--in", o_.in, "Sweep file (.csv or .json)")->required();
        th->add_option("--metric", o_.metric, "r1 | diamond")
            ->check(CLI::IsMember({"r1", "diamond"}))
            ->capture_default_str();
        th->add_flag("--no-refine", o_.no_refine, "Report grid intervals without bisection on the source");
        th->callback([this] {
            action_ = [this] {
                SweepTable table = load_table(o_.in);
                Metric metric = parse_metric(o_.metric);
                std::set<std::string> series;
                for (const auto &r : table.rows) {
                    series.insert(r.family + "/" + std::to_string(r.h) + "/" + detail::format_double(r.q_shor));
                }
                if (series.size() > 1) {
                    throw UsageError("sweep file mixes several series; threshold needs one");
                }
                MetricFunction refine;
                bool refined = false;
                if (!o_.no_refine && table.meta.contains("source")) {
                    SweepSource src = source_from_json(table.meta["source"]);
                    refine = source_metric(src, metric, o_.jobs);
                    refined = static_cast<bool>(refine);
                }
                auto est = find_crossings(table, metric, refine);
                ojson j;
                j["meta"] = meta_for("threshold", {{"in", o_.in}, {"metric", o_.metric}, {"no_refine", o_.no_refine}});
                j["meta"]["refined"] = refined;
                j.update(threshold_json(est));
                out_ << j.dump(2) << "\n";
            };
        });
    }

    void build_interpolate() {
        auto *ip = app_.add_subcommand("interpolate", "Random-code ensembles between Z-Shor (q=0) and X-Shor (q=1)");
        ip->fallthrough();
        ip->add_option("--q-shors", o_.q_shors, "Comma list of XCut densities")->capture_default_str();
        ip->add_option("--d", o_.d_list, "Comma list of square distances (exact backend, n <= 25)")->capture_default_str();
        ip->add_option("--thetas", o_.thetas, "Grid A:B:STEP or a comma list, in units of pi")->required();
        ip->add_option("--codes", o_.codes, "Random codes per point")->capture_default_str();
        ip->add_option("--samples", o_.samples, "Syndrome draws per code (0 = exact)")->capture_default_str();
        ip->add_option("--seed", o_.seed, "64-bit seed")->capture_default_str();
        ip->add_option("--recovery", o_.recovery, "minweight | ml")
            ->check(CLI::IsMember({"minweight", "ml"}))
            ->capture_default_str();
        ip->add_option("--out", o_.out, "Output table (.csv or .json); CSV on stdout when omitted");
        ip->callback([this] {
            action_ = [this] {
                InterpolationConfig cfg;
                cfg.q_shors = parse_doubles(o_.q_shors, "--q-shors");
                cfg.distances = parse_sizes(o_.d_list, "--d");
                cfg.thetas_over_pi = parse_thetas(o_.thetas);
                cfg.n_codes = o_.codes;
                cfg.n_samples = o_.samples;
                cfg.seed = o_.seed;
                cfg.recovery = parse_recovery(o_.recovery);
                auto res = interpolation_curve(cfg, o_.jobs);
                ojson config{{"q_shors", o_.q_shors}, {"d", o_.d_list}, {"thetas", o_.thetas},
                             {"codes", o_.codes},     {"samples", o_.samples}, {"seed", o_.seed},
                             {"recovery", o_.recovery}};
                res.table.meta["command"] = "interpolate";
                res.table.meta["config"] = config;
                ojson report;
                report["meta"] = meta_for("interpolate", config);
                report["r1_monotone_in_q"] = res.r1_monotone_in_q;
                report["thresholds"] = ojson::array();
                for (const auto &p : res.points) {
                    ojson pj = threshold_json(p.threshold);
                    pj["q_shor"] = p.q_shor;
                    report["thresholds"].push_back(pj);
                }
                if (o_.out.empty()) {
                    write_csv(res.table, out_);
                } else {
                    save_table(res.table, o_.out);
                    out_ << report.dump(2) << "\n";
                }
            };
        });
    }

    void emit_table(const SweepTable &table) {
        if (o_.out.empty()) {
            write_csv(table, out_);
        } else {
            save_table(table, o_.out);
        }
    }

    std::ostream &out_;
    CLI::App app_;
    Options o_;
    std::string config_path_;
    std::function<void()> action_;
};

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    try {
        Cli cli(out);
        return cli.parse_and_run(inject_config(args));
    } catch (const UsageError &e) {
        write_error(err, "usage", e.what());
        return kExitUsage;
    } catch (const LimitError &e) {
        write_error(err, "limit", e.what());
        return kExitFailure;
    } catch (const std::invalid_argument &e) {
        write_error(err, "invalid_input", e.what());
        return kExitUsage;
    } catch (const std::exception &e) {
        write_error(err, "failure", e.what());
        return kExitFailure;
    }
}

}  // namespace compass::cli
