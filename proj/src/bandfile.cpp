#include "escdim/bandfile.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace escdim {

namespace {

struct KeyValue {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, KeyValue>;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct ParsedFile {
    std::map<std::string, Section> sections;
    std::string origin;

    [[noreturn]] void fail(int line, const std::string& what) const {
        throw spec_error(origin + ":" + std::to_string(line) + ": " + what);
    }

    const Section* section(const std::string& name) const {
        auto it = sections.find(name);
        return it == sections.end() ? nullptr : &it->second;
    }

    std::string need(Section& sec, const std::string& sec_name, const std::string& key) const {
        auto it = sec.find(key);
        if (it == sec.end())
            throw spec_error(origin + ": section [" + sec_name + "] is missing key '" + key + "'");
        it->second.used = true;
        return it->second.value;
    }

    std::optional<std::string> get(Section& sec, const std::string& key) const {
        auto it = sec.find(key);
        if (it == sec.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    double num(Section& sec, const std::string& sec_name, const std::string& key) const {
        std::string v = need(sec, sec_name, key);
        try {
            size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw spec_error(origin + ": key '" + key + "' in [" + sec_name +
                             "] is not a number: '" + v + "'");
        }
    }

    double num_or(Section& sec, const std::string& sec_name, const std::string& key,
                  double fallback) const {
        if (!sec.count(key)) return fallback;
        return num(sec, sec_name, key);
    }
};

ParsedFile parse_sections(const std::string& text, const std::string& origin) {
    ParsedFile pf;
    pf.origin = origin;
    std::istringstream in(text);
    std::string line, current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') pf.fail(lineno, "unterminated section header");
            current = trim(t.substr(1, t.size() - 2));
            if (current.empty()) pf.fail(lineno, "empty section name");
            pf.sections[current];
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) pf.fail(lineno, "expected 'key = value'");
        if (current.empty()) pf.fail(lineno, "key outside any section");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty()) pf.fail(lineno, "empty key");
        if (pf.sections[current].count(key)) pf.fail(lineno, "duplicate key '" + key + "'");
        pf.sections[current][key] = {val, lineno, false};
    }
    return pf;
}

std::vector<LevelReal> parse_log_list(const ParsedFile& pf, const std::string& text) {
    std::vector<LevelReal> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        if (tok.size() > 2 && (tok[0] == '+' || tok[0] == '-') && tok[1] == 'L') {
            out.push_back(LevelReal::parse(tok));
        } else {
            try {
                out.emplace_back(std::stod(tok));
            } catch (const std::exception&) {
                throw spec_error(pf.origin + ": bad list entry '" + tok + "'");
            }
        }
    }
    return out;
}

SequenceSpec parse_sequence(const ParsedFile& pf, Section& sec, const std::string& name,
                            const std::shared_ptr<const SequenceSpec>& base) {
    std::string kind = pf.need(sec, name, "kind");
    if (kind == "explicit") {
        return SequenceSpec::explicit_logs_of(parse_log_list(pf, pf.need(sec, name, "logs")));
    } else if (kind == "geometric") {
        return SequenceSpec::geometric(pf.num_or(sec, name, "c", 1.0), pf.num(sec, name, "R"));
    } else if (kind == "log-poly") {
        return SequenceSpec::log_poly(static_cast<int>(pf.num(sec, name, "p")));
    } else if (kind == "tower") {
        return SequenceSpec::tower(pf.num(sec, name, "d"), pf.num_or(sec, name, "a1", 20.0));
    } else if (kind == "tower-var") {
        return SequenceSpec::tower_var(pf.num_or(sec, name, "a1", 20.0));
    } else if (kind == "power-band") {
        if (!base) throw spec_error(pf.origin + ": power-band needs an [a] sequence");
        return SequenceSpec::power_band(base);
    } else if (kind == "scalar-band") {
        if (!base) throw spec_error(pf.origin + ": scalar-band needs an [a] sequence");
        return SequenceSpec::scalar_band(pf.num(sec, name, "c"), base);
    } else if (kind == "double-exp") {
        return SequenceSpec::double_exp(static_cast<int>(pf.num(sec, name, "p")));
    } else if (kind == "log-square-tower") {
        return SequenceSpec::log_square_tower(pf.num(sec, name, "log_b1"));
    }
    throw spec_error(pf.origin + ": unknown sequence kind '" + kind + "' in [" + name + "]");
}

LambdaSpec parse_lambda(const ParsedFile& pf, Section* sec) {
    if (!sec) return LambdaSpec::constant_polar(1.0, 0.0);
    std::string kind = pf.need(*sec, "lambda", "kind");
    if (kind == "constant") {
        if (auto re = pf.get(*sec, "re")) {
            double im = pf.num_or(*sec, "lambda", "im", 0.0);
            return LambdaSpec::constant({std::stod(*re), im});
        }
        return LambdaSpec::constant_polar(pf.num_or(*sec, "lambda", "modulus", 1.0),
                                          pf.num_or(*sec, "lambda", "argument", 0.0));
    } else if (kind == "explicit") {
        std::vector<std::complex<double>> vals;
        std::istringstream in(pf.need(*sec, "lambda", "values"));
        std::string tok;
        while (in >> tok) {
            size_t comma = tok.find(',');
            if (comma == std::string::npos)
                vals.emplace_back(std::stod(tok), 0.0);
            else
                vals.emplace_back(std::stod(tok.substr(0, comma)),
                                  std::stod(tok.substr(comma + 1)));
        }
        return LambdaSpec::explicit_list(std::move(vals));
    } else if (kind == "seeded-random") {
        return LambdaSpec::seeded(pf.num(*sec, "lambda", "mod_lo"),
                                  pf.num(*sec, "lambda", "mod_hi"),
                                  static_cast<std::uint64_t>(pf.num(*sec, "lambda", "seed")));
    }
    throw spec_error(pf.origin + ": unknown lambda kind '" + kind + "'");
}

void parse_params(const ParsedFile& pf, Section* sec, AnalysisParams* out) {
    if (!sec) return;
    out->adm.q = pf.num_or(*sec, "params", "q", out->adm.q);
    out->assumptions.delta_min =
        pf.num_or(*sec, "params", "delta_min", out->assumptions.delta_min);
    out->assumptions.a_threshold =
        pf.num_or(*sec, "params", "a_threshold", out->assumptions.a_threshold);
    out->horizon = static_cast<int>(pf.num_or(*sec, "params", "horizon", out->horizon));
    out->assumptions.horizon = out->horizon;
    if (auto t = pf.get(*sec, "trim")) {
        if (*t != "auto") out->trim = std::stoi(*t);
    }
}

}  // namespace

BandFile parse_band_text(const std::string& text, const std::string& origin) {
    ParsedFile pf = parse_sections(text, origin);
    BandFile out;
    auto* params_sec = const_cast<Section*>(pf.section("params"));
    parse_params(pf, params_sec, &out.params);
    auto* lam_sec = const_cast<Section*>(pf.section("lambda"));
    out.lambda = parse_lambda(pf, lam_sec);

    if (auto* it_sec = const_cast<Section*>(pf.section("itinerary"))) {
        ItinerarySpec it;
        std::string scheme = pf.need(*it_sec, "itinerary", "scheme");
        it.scheme = scheme == "power"       ? ItinerarySpec::Scheme::Power
                    : scheme == "stretched" ? ItinerarySpec::Scheme::Stretched
                                            : throw spec_error(pf.origin +
                                                               ": scheme must be power|stretched");
        it.R = pf.num(*it_sec, "itinerary", "R");
        it.kappa = pf.num_or(*it_sec, "itinerary", "kappa", 2.0);
        if (auto s = pf.get(*it_sec, "s")) {
            it.skind = ItinerarySpec::SKind::Explicit;
            std::istringstream in(*s);
            double v;
            while (in >> v) it.s_list.push_back(v);
        } else if (it_sec->count("d")) {
            it.skind = ItinerarySpec::SKind::Example34;
            it.d = pf.num(*it_sec, "itinerary", "d");
            it.s1 = pf.num_or(*it_sec, "itinerary", "s1", 2.0);
        } else {
            it.skind = ItinerarySpec::SKind::Arith;
            it.s1 = pf.num_or(*it_sec, "itinerary", "s1", 1.0);
            it.step = pf.num_or(*it_sec, "itinerary", "step", 1.0);
        }
        it.validate();
        out.itinerary = it;
        return out;
    }

    auto* a_sec = const_cast<Section*>(pf.section("a"));
    auto* b_sec = const_cast<Section*>(pf.section("b"));
    if (!a_sec || !b_sec)
        throw spec_error(pf.origin + ": band files need [a] and [b] sections (or [itinerary])");
    auto a = std::make_shared<SequenceSpec>(parse_sequence(pf, *a_sec, "a", nullptr));
    SequenceSpec b = parse_sequence(pf, *b_sec, "b", a);
    out.band = std::make_shared<EscapeBand>(*a, std::move(b), out.lambda, origin);
    return out;
}

BandFile load_band_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_error("cannot open band file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_band_text(ss.str(), path);
}

}  // namespace escdim
