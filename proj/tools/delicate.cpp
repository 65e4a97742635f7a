#include "delicate/analytic.hpp"
#include "delicate/arith.hpp"
#include "delicate/covering.hpp"
#include "delicate/delicacy.hpp"
#include "delicate/digits.hpp"
#include "delicate/format.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using ordered_json = nlohmann::ordered_json;
namespace arith = delicate::arith;
namespace digits = delicate::digits;
namespace delicacy = delicate::delicacy;
namespace covering = delicate::covering;
namespace analytic = delicate::analytic;
namespace fmt = delicate::fmt;

namespace {

struct Common {
    unsigned threads = 1;
    uint64_t seed = 0;
    std::string format = "json-lines";
    std::string out = "-";
};

// Values that shape the result; --threads and --out are execution detail and
// stay out of the header so runs differ only where results could.
using ConfigKV = std::vector<std::pair<std::string, std::string>>;

std::string config_json(const ConfigKV& kv) {
    ordered_json cfg;
    for (const auto& [k, v] : kv) {
        // pass-through for values that are already JSON (arrays, numbers)
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
            cfg[k] = v.substr(1, v.size() - 2);   // forced string (big integers)
        } else if (!v.empty() && (v[0] == '[' || v[0] == '{')) {
            cfg[k] = ordered_json::parse(v);
        } else {
            bool numeric = !v.empty() && v.find_first_not_of("0123456789-") == std::string::npos;
            if (v == "true" || v == "false") cfg[k] = v == "true";
            else if (numeric) cfg[k] = ordered_json::parse(v);
            else cfg[k] = v;
        }
    }
    ordered_json line;
    line["config"] = cfg;
    return line.dump();
}

std::string config_comment(const ConfigKV& kv) {
    std::string s = "#";
    for (const auto& [k, v] : kv) {
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            s += " " + k + "=" + v.substr(1, v.size() - 2);
        else
            s += " " + k + "=" + v;
    }
    return s;
}

std::vector<int64_t> parse_s_set(const std::string& text) {
    std::vector<int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoll(item));
    }
    if (out.empty()) throw std::invalid_argument("--s-set: empty set");
    return out;
}

std::vector<uint64_t> parse_u64_list(const std::string& text, const char* flag) {
    std::vector<uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    if (out.empty()) throw std::invalid_argument(std::string(flag) + ": empty list");
    return out;
}

std::pair<uint64_t, uint64_t> parse_interval(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("--interval: expected lo:hi");
    uint64_t lo = std::stoull(text.substr(0, colon));
    uint64_t hi = std::stoull(text.substr(colon + 1));
    if (hi <= lo) throw std::invalid_argument("--interval: need lo < hi");
    return {lo, hi};
}

delicacy::ResidueClass parse_class(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("--class: expected b:W (decimal)");
    delicacy::ResidueClass c;
    c.b = mpz_class(text.substr(0, colon));
    c.W = mpz_class(text.substr(colon + 1));
    return c;
}

std::string s_set_json(const std::vector<int64_t>& s) {
    ordered_json j = s;
    return j.dump();
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

ordered_json record_json(const delicacy::DelicacyReport& rep) {
    ordered_json rec;
    rec["p"] = rep.p.get_str();
    rec["mode"] = delicacy::to_string(rep.mode);
    rec["verdict"] = rep.pass ? "pass" : "fail";
    if (rep.witness) {
        ordered_json w;
        w["a"] = rep.witness->tuple.a;
        w["i"] = rep.witness->tuple.i;
        w["j"] = rep.witness->tuple.j;
        w["k"] = rep.witness->tuple.k;
        w["s"] = rep.witness->tuple.s;
        w["value"] = rep.witness->value.get_str();
        rec["witness"] = w;
    } else {
        rec["witness"] = nullptr;
    }
    if (rep.used_probable) rec["probable"] = true;
    return rec;
}

// ---------------------------------------------------------------------------

int cmd_check(const Common& c, const std::string& p_text, uint32_t base,
              const std::string& mode_text, uint32_t K, uint64_t N, const std::string& s_text) {
    mpz_class p(p_text);
    delicacy::Mode mode = delicacy::mode_from_string(mode_text);
    std::vector<int64_t> S = parse_s_set(s_text);

    ConfigKV kv{{"command", "check"}, {"mode", mode_text}, {"p", "\"" + p_text + "\""}};
    delicacy::DelicacyReport rep;
    if (mode == delicacy::Mode::digit_change) {
        kv.push_back({"base", std::to_string(base)});
        rep = delicacy::is_digitally_delicate(p, base);
    } else {
        if (N == 0) {
            if (!mpz_fits_ulong_p(p.get_mpz_t()))
                throw std::invalid_argument("check: --N required for box modes with wide p");
            N = p.get_ui();
        }
        kv.push_back({"K", std::to_string(K)});
        kv.push_back({"N", std::to_string(N)});
        kv.push_back({"s_set", s_set_json(S)});
        digits::PerturbationBox box(K, N, S);
        rep = delicacy::is_widely_delicate(p, box, mode);
    }
    kv.push_back({"seed", std::to_string(c.seed)});
    kv.push_back({"format", c.format});

    Output out(c.out);
    out.os() << config_json(kv) << "\n" << record_json(rep).dump() << "\n";
    return 0;
}

int cmd_search(const Common& c, const std::string& interval_text, uint64_t N, uint32_t K,
               const std::string& mode_text, uint32_t base, const std::string& s_text,
               const std::string& class_text, bool records) {
    delicacy::SearchParams params;
    params.mode = delicacy::mode_from_string(mode_text);
    params.base = base;
    params.threads = c.threads;
    params.collect_reports = records;

    if (!interval_text.empty()) {
        auto [lo, hi] = parse_interval(interval_text);
        params.lo = lo;
        params.hi = hi;
    } else if (N > 0) {
        params.lo = N;
        params.hi = N + N / K + 1;
    } else {
        throw std::invalid_argument("search: need --interval or --N");
    }

    std::vector<int64_t> S = parse_s_set(s_text);
    if (params.mode != delicacy::Mode::digit_change)
        params.box.emplace(K, params.lo, S);
    if (!class_text.empty()) params.cls = parse_class(class_text);

    ConfigKV kv{{"command", "search"},
                {"mode", mode_text},
                {"interval", std::to_string(params.lo) + ":" + std::to_string(params.hi)}};
    if (params.mode == delicacy::Mode::digit_change) {
        kv.push_back({"base", std::to_string(base)});
    } else {
        kv.push_back({"K", std::to_string(K)});
        kv.push_back({"N", std::to_string(params.lo)});
        kv.push_back({"s_set", s_set_json(S)});
    }
    if (params.cls)
        kv.push_back({"class", params.cls->b.get_str() + ":" + params.cls->W.get_str()});
    kv.push_back({"records", records ? "true" : "false"});
    kv.push_back({"seed", std::to_string(c.seed)});
    kv.push_back({"format", c.format});

    delicacy::SearchResult res = delicacy::search_interval(params);

    Output out(c.out);
    out.os() << config_json(kv) << "\n";
    for (const auto& rep : res.reports) out.os() << record_json(rep).dump() << "\n";
    ordered_json stats;
    stats["stats"]["lo"] = res.stats.lo;
    stats["stats"]["hi"] = res.stats.hi;
    stats["stats"]["W"] = res.stats.W.get_str();
    stats["stats"]["b"] = res.stats.b.get_str();
    stats["stats"]["tested"] = res.stats.tested;
    stats["stats"]["excluded_le1"] = res.stats.excluded_le1;
    stats["stats"]["passing"] = res.stats.passing;
    out.os() << stats.dump() << "\n";
    ordered_json plist;
    plist["passing"] = res.primes;
    out.os() << plist.dump() << "\n";
    return 0;
}

int cmd_construct(const Common& c, uint32_t K, double M, const std::string& s_text,
                  const std::string& partition_mode, double epsilon, uint64_t prime_cap,
                  uint64_t effort_trial, uint64_t effort_rho) {
    covering::BuildOptions opts;
    opts.effort.trial_bound = effort_trial;
    opts.effort.rho_steps = effort_rho;
    opts.prime_cap = prime_cap;
    opts.epsilon = epsilon;
    if (partition_mode == "strict") opts.partition = covering::PartitionMode::strict;
    else if (partition_mode == "proportional") opts.partition = covering::PartitionMode::proportional;
    else throw std::invalid_argument("construct: --partition-mode must be strict|proportional");

    covering::CoveringSystem sys = covering::build_system(K, M, parse_s_set(s_text), opts);
    Output out(c.out);
    out.os() << covering::to_json(sys) << "\n";
    return 0;
}

bool audit_bound_ok(const covering::CoverageAudit& a) {
    mpq_class lhs(a.uncovered);
    mpq_class rhs = a.predicted_bound + a.family_size + 1;
    return lhs <= rhs;
}

int cmd_audit(const Common& c, const std::string& system_path, uint32_t i_max,
              const std::string& family_text) {
    std::ifstream in(system_path);
    if (!in) throw std::runtime_error("audit: cannot read system file: " + system_path);
    std::stringstream buf;
    buf << in.rdbuf();
    covering::CoveringSystem sys = covering::system_from_json(buf.str());

    ConfigKV kv{{"command", "audit"},
                {"system", "K=" + std::to_string(sys.K) + ",M=" + fmt::to_sig15(sys.M)},
                {"i_max", std::to_string(i_max)}};
    if (!family_text.empty()) kv.push_back({"family", family_text});
    kv.push_back({"seed", std::to_string(c.seed)});
    kv.push_back({"format", c.format});

    std::vector<covering::CoverageAudit> audits;
    if (!family_text.empty()) {
        auto parts = parse_s_set(family_text);   // a,j,k,s_index as integers
        if (parts.size() != 4)
            throw std::invalid_argument("audit: --family expects a,j,k,s_index");
        covering::FamilyKey key{static_cast<uint32_t>(parts[0]), static_cast<int32_t>(parts[1]),
                                static_cast<uint32_t>(parts[2]), static_cast<uint32_t>(parts[3])};
        audits.push_back(covering::audit_coverage(sys, key, i_max));
    } else {
        audits = covering::audit_all(sys, i_max, c.threads);
    }

    Output out(c.out);
    out.os() << config_json(kv) << "\n";
    bool all_ok = true;
    for (const auto& a : audits) {
        bool ok = audit_bound_ok(a);
        all_ok = all_ok && ok;
        ordered_json line;
        line["family"]["a"] = a.family.a;
        line["family"]["j"] = a.family.j;
        line["family"]["k"] = a.family.k;
        line["family"]["s_index"] = a.family.s_index;
        line["i_max"] = a.i_max;
        line["family_size"] = a.family_size;
        line["covered"] = a.covered;
        line["uncovered"] = a.uncovered;
        line["density"] = a.density.get_str();
        line["predicted_bound"] = a.predicted_bound.get_str();
        line["bound_ok"] = ok;
        line["checked_congruences"] = a.checked_congruences;
        line["empirical_exponent"] = a.empirical_exponent;
        out.os() << line.dump() << "\n";
    }
    covering::Qo1Result qo1 = covering::qo1_check(sys);
    ordered_json summary;
    summary["summary"]["families"] = audits.size();
    summary["summary"]["all_bounds_ok"] = all_ok;
    summary["summary"]["sum_inv_q"] = qo1.sum_inv_q;
    summary["summary"]["sum_inv_plogp"] = qo1.sum_inv_plogp;
    out.os() << summary.dump() << "\n";
    if (!all_ok) return 2;
    return 0;
}

int cmd_series(const Common& c, const std::string& kind, uint64_t A, uint64_t Sv, uint64_t X,
               uint64_t x, uint32_t y, uint64_t limit, uint64_t p, const std::string& Z_text,
               uint64_t samples, uint64_t d, uint64_t a, int64_t j, int64_t s) {
    bool csv = c.format == "csv";
    Output out(c.out);
    std::ostream& os = out.os();

    auto emit = [&](const ConfigKV& kv, const std::vector<std::string>& header,
                    const std::vector<std::string>& row) {
        if (csv) {
            os << config_comment(kv) << "\n";
            for (size_t i = 0; i < header.size(); ++i)
                os << header[i] << (i + 1 < header.size() ? "," : "\n");
            for (size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 < row.size() ? "," : "\n");
        } else {
            os << config_json(kv) << "\n";
            ordered_json line;
            for (size_t i = 0; i < header.size(); ++i) line["series"][header[i]] = row[i];
            os << line.dump() << "\n";
        }
    };

    ConfigKV kv{{"command", "series"}, {"kind", kind}};
    if (kind == "romanoff") {
        analytic::SeriesEstimate est = analytic::romanoff_partial_sum(A, Sv, X, c.threads);
        kv.insert(kv.end(), {{"A", std::to_string(A)},
                             {"S", std::to_string(Sv)},
                             {"X", std::to_string(X)},
                             {"seed", std::to_string(c.seed)},
                             {"format", c.format}});
        emit(kv, {"kind", "A", "S", "X", "partial_sum", "last_block"},
             {kind, std::to_string(A), std::to_string(Sv), std::to_string(X),
              fmt::to_decimal(est.partial_sum, 30), fmt::to_decimal(est.last_block, 30)});
    } else if (kind == "mertens") {
        analytic::MertensResult r = analytic::mertens_product(x);
        kv.insert(kv.end(),
                  {{"x", std::to_string(x)}, {"seed", std::to_string(c.seed)}, {"format", c.format}});
        emit(kv, {"kind", "x", "product", "reference"},
             {kind, std::to_string(x), fmt::to_decimal(r.product, 30), fmt::to_sig15(r.reference)});
    } else if (kind == "smooth") {
        analytic::SmoothSum r = analytic::smooth_squarefree_sum(y);
        kv.insert(kv.end(),
                  {{"y", std::to_string(y)}, {"seed", std::to_string(c.seed)}, {"format", c.format}});
        emit(kv, {"kind", "y", "enumerated", "product", "mertens_squared", "equal", "bounded"},
             {kind, std::to_string(y), r.enumerated.get_str(), r.product.get_str(),
              r.mertens_squared.get_str(), r.equal ? "true" : "false",
              r.bounded ? "true" : "false"});
    } else if (kind == "smooth-scan") {
        analytic::SmoothBoundScan r = analytic::smooth_product_bound_scan(limit);
        kv.insert(kv.end(), {{"limit", std::to_string(limit)},
                             {"seed", std::to_string(c.seed)},
                             {"format", c.format}});
        emit(kv, {"kind", "limit", "log_product", "log_mertens_sq", "bounded_throughout"},
             {kind, std::to_string(limit), fmt::to_sig15(r.log_product),
              fmt::to_sig15(r.log_mertens_sq), r.bounded_throughout ? "true" : "false"});
    } else if (kind == "identity") {
        if (limit > 0) {
            uint64_t count = 0;
            bool all_equal = true;
            for (uint64_t q : arith::primes_below(limit + 1)) {
                analytic::SquareIdentity r = analytic::square_identity_check(q);
                ++count;
                all_equal = all_equal && r.equal;
            }
            kv.insert(kv.end(), {{"limit", std::to_string(limit)},
                                 {"seed", std::to_string(c.seed)},
                                 {"format", c.format}});
            emit(kv, {"kind", "limit", "primes_checked", "all_equal"},
                 {kind, std::to_string(limit), std::to_string(count),
                  all_equal ? "true" : "false"});
        } else {
            analytic::SquareIdentity r = analytic::square_identity_check(p);
            kv.insert(kv.end(), {{"p", std::to_string(p)},
                                 {"seed", std::to_string(c.seed)},
                                 {"format", c.format}});
            emit(kv, {"kind", "p", "lhs", "rhs", "equal"},
                 {kind, std::to_string(p), r.lhs.get_str(), r.rhs.get_str(),
                  r.equal ? "true" : "false"});
        }
    } else if (kind == "truncation") {
        mpz_class Z(Z_text);
        analytic::TailReport r = analytic::truncation_tail_bound(Z, y, samples, c.seed);
        kv.insert(kv.end(), {{"Z", "\"" + Z_text + "\""},
                             {"y", std::to_string(y)},
                             {"samples", std::to_string(samples)},
                             {"seed", std::to_string(c.seed)},
                             {"format", c.format}});
        emit(kv,
             {"kind", "Z", "y", "samples", "skipped", "max_product", "max_ratio", "all_ok",
              "worst_v"},
             {kind, Z_text, std::to_string(y), std::to_string(r.samples),
              std::to_string(r.skipped), fmt::to_sig15(r.max_product),
              fmt::to_sig15(r.max_ratio), r.all_ok ? "true" : "false", r.worst.v.get_str()});
    } else if (kind == "residue-class") {
        analytic::ResidueClassResult r = analytic::residue_class_of_i(d, a, j, s);
        kv.insert(kv.end(), {{"d", std::to_string(d)},
                             {"a", std::to_string(a)},
                             {"j", std::to_string(j)},
                             {"s", std::to_string(s)},
                             {"seed", std::to_string(c.seed)},
                             {"format", c.format}});
        emit(kv,
             {"kind", "d", "a", "j", "s", "B_d", "d_prime", "ell", "has_solution", "i0",
              "gcd_chain_ok"},
             {kind, std::to_string(d), std::to_string(a), std::to_string(j), std::to_string(s),
              std::to_string(r.B_d), std::to_string(r.d_prime), std::to_string(r.ell),
              r.has_solution ? "true" : "false", std::to_string(r.i0),
              r.gcd_chain_ok ? "true" : "false"});
    } else {
        throw std::invalid_argument("series: unknown --kind " + kind);
    }
    return 0;
}

int cmd_sieve_ratio(const Common& c, const std::string& grid_text, const std::string& W_text,
                    const std::string& b_text, int64_t k, int64_t h) {
    std::vector<uint64_t> grid = parse_u64_list(grid_text, "--x-grid");
    mpz_class W(W_text), b(b_text);
    auto points = analytic::sieve_ratio_experiment(grid, W, b, k, h, c.threads);

    ConfigKV kv{{"command", "sieve-ratio"}, {"x_grid", grid_text},
                {"W", "\"" + W_text + "\""}, {"b", "\"" + b_text + "\""},
                {"k", std::to_string(k)},    {"h", std::to_string(h)},
                {"seed", std::to_string(c.seed)},
                {"format", c.format}};
    Output out(c.out);
    std::ostream& os = out.os();
    bool csv = c.format == "csv";
    if (csv) {
        os << config_comment(kv) << "\n";
        os << "x,W,b,k,h,count,normalized,product_factor,ratio\n";
    } else {
        os << config_json(kv) << "\n";
    }
    for (const auto& pt : points) {
        double ratio = pt.normalized / pt.product_factor;
        if (csv) {
            os << pt.x << "," << pt.W.get_str() << "," << pt.b.get_str() << "," << pt.k << ","
               << pt.h << "," << pt.count << "," << fmt::to_sig15(pt.normalized) << ","
               << fmt::to_sig15(pt.product_factor) << "," << fmt::to_sig15(ratio) << "\n";
        } else {
            ordered_json line;
            line["x"] = pt.x;
            line["W"] = pt.W.get_str();
            line["b"] = pt.b.get_str();
            line["k"] = pt.k;
            line["h"] = pt.h;
            line["count"] = pt.count;
            line["normalized"] = pt.normalized;
            line["product_factor"] = pt.product_factor;
            line["ratio"] = ratio;
            os << line.dump() << "\n";
        }
    }
    return 0;
}

int cmd_density(const Common& c, const std::string& grid_text, uint32_t K,
                const std::string& mode_text, uint32_t base, const std::string& s_text,
                const std::string& class_text) {
    std::vector<uint64_t> grid = parse_u64_list(grid_text, "--grid");
    std::vector<delicacy::SearchStats> stats;
    for (uint64_t N : grid) {
        delicacy::SearchParams params;
        params.lo = N;
        params.hi = N + N / K + 1;
        params.mode = delicacy::mode_from_string(mode_text);
        params.base = base;
        params.threads = c.threads;
        if (params.mode != delicacy::Mode::digit_change)
            params.box.emplace(K, N, parse_s_set(s_text));
        if (!class_text.empty()) params.cls = parse_class(class_text);
        stats.push_back(delicacy::search_interval(params).stats);
    }
    auto rows = delicacy::density_report(stats);

    ConfigKV kv{{"command", "density"}, {"grid", grid_text}, {"K", std::to_string(K)},
                {"mode", mode_text},    {"base", std::to_string(base)}};
    if (!class_text.empty()) kv.push_back({"class", class_text});
    kv.push_back({"seed", std::to_string(c.seed)});
    kv.push_back({"format", c.format});

    Output out(c.out);
    std::ostream& os = out.os();
    if (c.format == "csv") {
        os << config_comment(kv) << "\n";
        os << "N,Q_N,K_N,ratio\n";
        for (const auto& r : rows)
            os << r.N << "," << r.Q_N << "," << r.K_N << "," << fmt::to_sig15(r.ratio) << "\n";
    } else {
        os << config_json(kv) << "\n";
        for (const auto& r : rows) {
            ordered_json line;
            line["N"] = r.N;
            line["Q_N"] = r.Q_N;
            line["K_N"] = r.K_N;
            line["ratio"] = r.ratio;
            os << line.dump() << "\n";
        }
    }
    return 0;
}

}   // namespace

int main(int argc, char** argv) {
    CLI::App app{"digitally delicate prime search, covering-system construction, and "
                 "series verification"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; command-line flags win");

    Common common;
    app.add_option("--threads", common.threads, "worker threads")
        ->envname("DELICATE_THREADS")
        ->check(CLI::Range(1u, 256u));
    app.add_option("--seed", common.seed, "seed for randomized sampling");
    app.add_option("--format", common.format, "json-lines | csv")
        ->check(CLI::IsMember({"json-lines", "csv"}));
    app.add_option("--out", common.out, "output path, - for stdout");

    // check
    auto* check = app.add_subcommand("check", "test one prime for delicacy");
    std::string ck_p, ck_mode = "digit-change", ck_s = "0";
    uint32_t ck_base = 10, ck_K = 2;
    uint64_t ck_N = 0;
    check->add_option("--p", ck_p, "the prime to test")->required();
    check->add_option("--base", ck_base, "base for digit-change mode");
    check->add_option("--mode", ck_mode, "digit-change | tao-box | theorem2-box");
    check->add_option("--K", ck_K, "box parameter K");
    check->add_option("--N", ck_N, "box parameter N (default: p)");
    check->add_option("--s-set", ck_s, "comma-separated shift set S");

    // search
    auto* search = app.add_subcommand("search", "scan an interval for delicate primes");
    std::string se_interval, se_mode = "digit-change", se_s = "0", se_class;
    uint64_t se_N = 0;
    uint32_t se_K = 2, se_base = 10;
    bool se_records = false;
    search->add_option("--interval", se_interval, "lo:hi, half-open");
    search->add_option("--N", se_N, "interval start; implies hi = N + N/K");
    search->add_option("--K", se_K, "box/interval parameter K");
    search->add_option("--mode", se_mode, "digit-change | tao-box | theorem2-box");
    search->add_option("--base", se_base, "base for digit-change mode");
    search->add_option("--s-set", se_s, "comma-separated shift set S");
    search->add_option("--class", se_class, "b:W residue class restriction");
    search->add_flag("--records", se_records, "emit a JSON record per tested prime");

    // construct
    auto* construct = app.add_subcommand("construct", "build a covering system");
    uint32_t co_K = 2;
    double co_M = 0.2, co_eps = 0.5;
    std::string co_s = "0", co_pmode = "proportional";
    uint64_t co_cap = 10000, co_trial = 1'000'000, co_rho = 10'000'000;
    construct->add_option("--K", co_K, "family bound K")->required();
    construct->add_option("--M", co_M, "harmonic mass target")->required();
    construct->add_option("--s-set", co_s, "comma-separated shift set S");
    construct->add_option("--partition-mode", co_pmode, "proportional | strict");
    construct->add_option("--epsilon", co_eps, "strict-mode slack");
    construct->add_option("--prime-cap", co_cap, "largest p to scan");
    construct->add_option("--effort-trial", co_trial, "trial division bound");
    construct->add_option("--effort-rho", co_rho, "rho step budget");

    // audit
    auto* audit = app.add_subcommand("audit", "verify coverage of a built system");
    std::string au_system, au_family;
    uint32_t au_imax = 10000;
    audit->add_option("--system", au_system, "system JSON file from construct")->required();
    audit->add_option("--i-max", au_imax, "exponent range to audit");
    audit->add_option("--family", au_family, "a,j,k,s_index (default: all families)");

    // series
    auto* series = app.add_subcommand("series", "analytic series and identities");
    std::string sr_kind, sr_Z = "1000000000000";
    uint64_t sr_A = 10, sr_S = 2, sr_X = 1000, sr_x = 1000, sr_limit = 0, sr_p = 2;
    uint64_t sr_samples = 200, sr_d = 7, sr_a = 10;
    int64_t sr_j = 1, sr_s = 0;
    uint32_t sr_y = 10;
    series->add_option("--kind", sr_kind,
                       "romanoff | mertens | smooth | smooth-scan | identity | truncation | "
                       "residue-class")
        ->required();
    series->add_option("--A", sr_A, "romanoff base A");
    series->add_option("--S", sr_S, "romanoff numerator base S");
    series->add_option("--X", sr_X, "romanoff truncation");
    series->add_option("--x", sr_x, "mertens bound");
    series->add_option("--y", sr_y, "smoothness threshold");
    series->add_option("--limit", sr_limit, "prime scan bound (identity, smooth-scan)");
    series->add_option("--p", sr_p, "single prime (identity)");
    series->add_option("--Z", sr_Z, "truncation value bound");
    series->add_option("--samples", sr_samples, "truncation sample count");
    series->add_option("--d", sr_d, "residue-class modulus");
    series->add_option("--a", sr_a, "residue-class base");
    series->add_option("--j", sr_j, "residue-class coefficient");
    series->add_option("--s", sr_s, "residue-class shift");

    // sieve-ratio
    auto* ratio = app.add_subcommand("sieve-ratio", "double-sieve count experiment");
    // --h would collide with the short help flag, so this subcommand only has --help
    ratio->set_help_flag("--help", "print help and exit");
    std::string ra_grid, ra_W = "1", ra_b = "0";
    int64_t ra_k = 1, ra_h = 2;
    ratio->add_option("--x-grid", ra_grid, "comma-separated x values")->required();
    ratio->add_option("--W", ra_W, "class modulus (decimal)");
    ratio->add_option("--b", ra_b, "class residue (decimal)");
    ratio->add_option("--k", ra_k, "multiplier k");
    ratio->add_option("--h", ra_h, "offset h");

    // density
    auto* density = app.add_subcommand("density", "delicate-prime density table");
    std::string de_grid, de_mode = "digit-change", de_s = "0", de_class;
    uint32_t de_K = 2, de_base = 10;
    density->add_option("--grid", de_grid, "comma-separated N values")->required();
    density->add_option("--K", de_K, "interval parameter K");
    density->add_option("--mode", de_mode, "predicate mode");
    density->add_option("--base", de_base, "base for digit-change mode");
    density->add_option("--s-set", de_s, "comma-separated shift set S");
    density->add_option("--class", de_class, "b:W residue class restriction");

    // global flags (--threads, --out, ...) may appear after the subcommand name
    for (auto* sc : {check, search, construct, audit, series, ratio, density}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(check))
            return cmd_check(common, ck_p, ck_base, ck_mode, ck_K, ck_N, ck_s);
        if (app.got_subcommand(search))
            return cmd_search(common, se_interval, se_N, se_K, se_mode, se_base, se_s, se_class,
                              se_records);
        if (app.got_subcommand(construct))
            return cmd_construct(common, co_K, co_M, co_s, co_pmode, co_eps, co_cap, co_trial,
                                 co_rho);
        if (app.got_subcommand(audit)) return cmd_audit(common, au_system, au_imax, au_family);
        if (app.got_subcommand(series))
            return cmd_series(common, sr_kind, sr_A, sr_S, sr_X, sr_x, sr_y, sr_limit, sr_p, sr_Z,
                              sr_samples, sr_d, sr_a, sr_j, sr_s);
        if (app.got_subcommand(ratio)) return cmd_sieve_ratio(common, ra_grid, ra_W, ra_b, ra_k, ra_h);
        if (app.got_subcommand(density))
            return cmd_density(common, de_grid, de_K, de_mode, de_base, de_s, de_class);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
