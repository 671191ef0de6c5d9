// escdim: escape-band dimension analysis for non-autonomous exponential
// iteration. Subcommands: analyze, annular, cover, selftest.
//
// Exit codes: 0 success, 2 specification/parse error, 3 hypothesis or
// assumption failure (a report is still emitted), 4 budget/precision refusal.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "escdim/bandfile.hpp"
#include "escdim/cover.hpp"
#include "escdim/presets.hpp"
#include "escdim/report_json.hpp"

using namespace escdim;

namespace {

struct CommonOpts {
    std::string file;
    std::string preset;
    std::optional<double> d;
    std::optional<double> kappa;
    int horizon = 0;
    bool json = false;
    bool csv = false;
    bool no_meta = false;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts* o, bool with_file = true) {
    if (with_file) cmd->add_option("file", o->file, "band or itinerary specification file");
    cmd->add_option("--preset", o->preset, "named preset");
    cmd->add_option("--d", [o](const std::vector<std::string>& v) {
        o->d = std::stod(v.at(0));
        return true;
    }, "preset growth parameter d");
    cmd->add_option("--kappa", [o](const std::vector<std::string>& v) {
        o->kappa = std::stod(v.at(0));
        return true;
    }, "stretched-scheme exponent");
    cmd->add_option("--horizon", o->horizon, "series horizon override");
    cmd->add_flag("--json", o->json, "emit a JSON report (default)");
    cmd->add_flag("--csv", o->csv, "emit flat CSV series instead of JSON");
    cmd->add_flag("--no-meta", o->no_meta, "omit timestamps for byte-stable output");
    cmd->add_option("-o,--out", o->out, "write the report to a file instead of stdout");
}

void emit(const CommonOpts& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw spec_error("cannot write '" + o.out + "'");
    f << text << "\n";
}

int default_horizon() {
    if (const char* env = std::getenv("ESCDIM_HORIZON")) return std::atoi(env);
    return 0;
}

int run_analyze(const CommonOpts& o) {
    BandPtr band;
    AnalysisParams params;
    ordered_json echo;
    if (!o.preset.empty()) {
        Preset p = make_preset(o.preset, o.d, o.kappa);
        if (p.is_itinerary)
            throw spec_error("preset '" + o.preset + "' is an itinerary; use the annular command");
        params = p.params;
        band = p.make_band();
        echo = band_echo(*band, params);
        echo["preset"] = p.name;
        echo["note"] = p.note;
    } else if (!o.file.empty()) {
        BandFile bf = load_band_file(o.file);
        if (!bf.band)
            throw spec_error("file defines an itinerary; use the annular command");
        band = bf.band;
        params = bf.params;
        echo = band_echo(*band, params);
    } else {
        throw spec_error("analyze needs a band file or --preset");
    }
    if (o.horizon > 0) params.horizon = params.assumptions.horizon = o.horizon;
    else if (int h = default_horizon()) params.horizon = params.assumptions.horizon = h;

    ConsolidatedReport rep = analyze_band(band, params);
    if (o.csv)
        emit(o, series_to_csv(rep.merged.series));
    else
        emit(o, consolidated_to_json(rep, std::move(echo), !o.no_meta).dump(2));
    return rep.assumptions_ok ? 0 : 3;
}

int run_annular(const CommonOpts& o) {
    ItinerarySpec it;
    LambdaSpec lambda = LambdaSpec::constant_polar(1.0, 0.0);
    AnalysisParams params;
    params.horizon = 12;
    if (!o.preset.empty()) {
        Preset p = make_preset(o.preset, o.d, o.kappa);
        if (!p.is_itinerary)
            throw spec_error("preset '" + o.preset + "' is a band; use the analyze command");
        it = p.itinerary;
        lambda = p.lambda;
        params = p.params;
    } else if (!o.file.empty()) {
        BandFile bf = load_band_file(o.file);
        if (!bf.itinerary) throw spec_error("file does not define an [itinerary] section");
        it = *bf.itinerary;
        lambda = bf.lambda;
        params = bf.params;
    } else {
        throw spec_error("annular needs an itinerary file or --preset");
    }
    if (o.horizon > 0) params.horizon = o.horizon;
    else if (int h = default_horizon()) params.horizon = h;

    AnnularResult res;
    bool hypothesis_ok = true;
    if (it.skind == ItinerarySpec::SKind::Example34) {
        AnnularExampleResult ex =
            cor_ann_example(it.d, it.kappa, it.R, lambda, params.adm.q, params.horizon);
        res = std::move(ex.inner);
        res.series.push_back(std::move(ex.d_witness));
        hypothesis_ok = res.admissibility.admissible && res.strict_bound_ok;
    } else if (it.scheme == ItinerarySpec::Scheme::Power) {
        res = thm_annular_dims(it, lambda, params.adm.q, params.horizon);
        hypothesis_ok = res.limsup_witness;
    } else {
        res = thm_annular2_dims(it, lambda, params.adm.q, params.horizon);
        hypothesis_ok = res.s_to_inf_witness && res.admissibility.admissible;
    }
    if (o.csv) {
        std::vector<RatioSeries> all;
        all.push_back(res.cesaro);
        for (const auto& s : res.series) all.push_back(s);
        emit(o, series_to_csv(all));
    } else {
        emit(o, annular_to_json(res, itinerary_echo(it, lambda, params), !o.no_meta).dump(2));
    }
    return hypothesis_ok ? 0 : 3;
}

struct CoverOpts {
    CommonOpts common;
    std::string mode = "sum";
    int depth = 8;
    double exponent = 1.2;
    int N = 1;
    double delta = 0.0;  // 0: derived from the grid invariant
    int bits = 128;
    std::string word_file;
    double w_re = 0, w_im = 0;
};

std::vector<std::pair<int, int>> load_word(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_error("cannot open word file '" + path + "'");
    std::vector<std::pair<int, int>> w;
    int n, j, k;
    while (in >> n >> j >> k) w.emplace_back(j, k);
    if (w.empty()) throw spec_error("word file '" + path + "' holds no letters");
    return w;
}

int run_cover(const CoverOpts& co) {
    const CommonOpts& o = co.common;
    BandPtr band;
    AnalysisParams params;
    ordered_json echo;
    if (!o.preset.empty()) {
        Preset p = make_preset(o.preset, o.d, o.kappa);
        if (p.is_itinerary) {
            band = itinerary_band(p.itinerary, p.lambda, co.depth + 4);
            params = p.params;
        } else {
            band = p.make_band();
            params = p.params;
        }
        echo["preset"] = p.name;
    } else if (!o.file.empty()) {
        BandFile bf = load_band_file(o.file);
        band = bf.band ? bf.band : itinerary_band(*bf.itinerary, bf.lambda, co.depth + 4);
        params = bf.params;
        if (bf.band) echo = band_echo(*band, params);
    } else {
        throw spec_error("cover needs a band file or --preset");
    }
    GridParams gp;
    gp.N = co.N;
    gp.q = params.adm.q;
    gp.delta_min = params.assumptions.delta_min;
    gp.a_threshold = params.assumptions.a_threshold;
    gp.delta = co.delta > 0 ? co.delta
                            : 0.9 * std::min({gp.delta_min / 4, 1.0,
                                              std::log(1 / std::sqrt(gp.q))});
    CoverGrid grid(band, gp);

    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["spec"] = std::move(echo);
    j["grid"] = {{"N", gp.N}, {"delta", gp.delta}, {"q", gp.q}};
    j["ledger"] = ledger_to_json(grid.ledger());

    if (co.mode == "sum") {
        ordered_json rows = ordered_json::array();
        std::string csv = "expression-id,n,value,flag\n";
        for (int n = 1; n <= co.depth; ++n) {
            try {
                LevelReal lb = grid.cover_sum_logbound(co.exponent, n);
                double v = sat_to_double(lb);
                rows.push_back({{"n", n}, {"log_bound", v}, {"decays", v < -n * std::log(2.0)}});
                csv += "cover-sum-log-bound," + std::to_string(n) + "," + std::to_string(v) + ",0\n";
            } catch (const std::exception& e) {
                rows.push_back({{"n", n}, {"truncated", e.what()}});
                break;
            }
        }
        j["cover_sum"] = std::move(rows);
        if (o.csv) { emit(o, csv); return 0; }
    } else if (co.mode == "count") {
        ordered_json rows = ordered_json::array();
        std::string csv = "n,j,k,exact_lower,exact_upper,bound_lower,bound_upper\n";
        for (int n = 0; n < co.depth; ++n) {
            JRange jr = grid.j_range(n + 1);
            if (jr.empty()) continue;
            int jmid = (jr.lo + jr.hi) / 2;
            CountResult bounds = grid.count_branches(n, jmid, 0, false);
            CountResult exact = grid.count_branches(n, jmid, 0, true);
            rows.push_back({{"n", n},
                            {"j", jmid},
                            {"k", 0},
                            {"exact", {{"lower", exact.lower}, {"upper", exact.upper}}},
                            {"bounds", {{"lower", bounds.lower}, {"upper", bounds.upper}}},
                            {"bracket_ok", bounds.lower <= exact.lower + 1e-9 &&
                                               exact.upper <= bounds.upper + 1e-9}});
            csv += std::to_string(n) + "," + std::to_string(jmid) + ",0," +
                   std::to_string(exact.lower) + "," + std::to_string(exact.upper) + "," +
                   std::to_string(bounds.lower) + "," + std::to_string(bounds.upper) + "\n";
        }
        j["counts"] = std::move(rows);
        if (o.csv) { emit(o, csv); return 0; }
    } else if (co.mode == "profile") {
        auto word = co.word_file.empty() ? grid.canonical_word(co.depth)
                                         : load_word(co.word_file);
        ProfileResult pr = grid.local_dimension_profile(word, co.depth);
        ordered_json rows = ordered_json::array();
        for (const auto& r : pr.rows)
            rows.push_back({{"n", r.n},
                            {"sampled_inf", r.sampled_inf},
                            {"sampled_sup", r.sampled_sup},
                            {"target_inf", r.target_inf},
                            {"target_sup", r.target_sup},
                            {"phi", r.phi},
                            {"psi", r.psi}});
        j["profile"] = std::move(rows);
        j["final_gap_inf"] = pr.final_gap_inf;
        j["final_gap_sup"] = pr.final_gap_sup;
    } else if (co.mode == "pullback") {
        auto word = co.word_file.empty() ? grid.canonical_word(co.depth - 1)
                                         : load_word(co.word_file);
        std::complex<double> w(co.w_re, co.w_im);
        if (std::abs(w) == 0) {
            // default target: the geometric middle of the terminal band level
            BandTerms t = band->terms(gp.N + static_cast<int>(word.size()) - 1);
            double mid = (sat_to_double(t.log_a) + sat_to_double(t.log_b)) / 2;
            w = std::exp(mid);
        }
        PullbackResult pr = grid.pullback_point(word, w, co.bits);
        ordered_json steps = ordered_json::array();
        for (const auto& s : pr.steps)
            steps.push_back({{"m", s.m},
                             {"log_margin_lo", s.log_margin_lo},
                             {"log_margin_hi", s.log_margin_hi},
                             {"verified", s.verified}});
        j["pullback"] = {{"z_re", pr.z.real()},
                         {"z_im", pr.z.imag()},
                         {"bits", pr.precision_bits},
                         {"fully_verified", pr.fully_verified},
                         {"verified_depth", pr.verified_depth},
                         {"steps", std::move(steps)}};
    } else {
        throw spec_error("cover --mode must be sum|count|profile|pullback");
    }
    emit(o, j.dump(2));
    return 0;
}

int run_selftest() {
    auto results = run_preset_selftests();
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
        if (!r.pass) std::cout << "  (" << r.detail << ")";
        std::cout << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"escape-band dimension analysis for exponential iteration"};
    app.require_subcommand(1);

    CommonOpts analyze_opts, annular_opts;
    CoverOpts cover_opts;

    CLI::App* analyze = app.add_subcommand("analyze", "dimension bounds and classification");
    add_common(analyze, &analyze_opts);
    CLI::App* annular = app.add_subcommand("annular", "annular itinerary theorems");
    add_common(annular, &annular_opts);
    CLI::App* cover = app.add_subcommand("cover", "finite-depth cover and measure checks");
    add_common(cover, &cover_opts.common);
    cover->add_option("--mode", cover_opts.mode, "sum|count|profile|pullback");
    cover->add_option("--depth", cover_opts.depth, "depth of the construction");
    cover->add_option("--exponent", cover_opts.exponent, "cover-sum exponent D > 1");
    cover->add_option("--start-index", cover_opts.N, "grid start index N");
    cover->add_option("--delta", cover_opts.delta, "grid cell width");
    cover->add_option("--bits", cover_opts.bits, "pullback precision bits");
    cover->add_option("--word", cover_opts.word_file, "word file with lines 'n j k'");
    cover->add_option("--w-re", cover_opts.w_re, "pullback target, real part");
    cover->add_option("--w-im", cover_opts.w_im, "pullback target, imaginary part");
    CLI::App* selftest = app.add_subcommand("selftest", "run every preset against its expected fragment");
    selftest->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return run_analyze(analyze_opts);
        if (annular->parsed()) return run_annular(annular_opts);
        if (cover->parsed()) return run_cover(cover_opts);
        if (selftest->parsed()) return run_selftest();
    } catch (const budget_error& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 4;
    } catch (const depth_limit_error& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 4;
    } catch (const spec_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
