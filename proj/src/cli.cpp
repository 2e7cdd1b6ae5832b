#include "gaugekit/cli.hpp"

#include "gaugekit/cov.hpp"
#include "gaugekit/funcs.hpp"
#include "gaugekit/integrate.hpp"
#include "gaugekit/report_io.hpp"
#include "gaugekit/sets.hpp"
#include "gaugekit/variation.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace gaugekit::cli {

namespace {

struct UnknownName : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Common {
    std::string out;
    std::uint64_t seed = 0;
    unsigned samples = 8;
    std::vector<std::string> eps{"1/10", "1/100"};
    unsigned max_depth = 64;
};

unsigned default_depth_cap()
{
    if (const char* env = std::getenv("GAUGEKIT_DEPTH_CAP")) {
        try {
            long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw std::invalid_argument(std::string("GAUGEKIT_DEPTH_CAP must be a positive integer, got '") + env + "'");
    }
    return 64;
}

void add_common(CLI::App* cmd, Common& c, const std::string& default_out, bool randomized = true)
{
    c.out = default_out;
    cmd->add_option("--out", c.out, "report file")->capture_default_str();
    cmd->add_option("--max-depth", c.max_depth, "bisection depth cap (default from GAUGEKIT_DEPTH_CAP or 64)");
    if (!randomized) return;
    cmd->add_option("--seed", c.seed, "seed for randomized partitions")->capture_default_str();
    cmd->add_option("--samples", c.samples, "partitions per eps")->capture_default_str();
    cmd->add_option("--eps", c.eps, "eps schedule (num/den, decimals or 1e-3 forms)")->delimiter(',')->capture_default_str();
}

std::vector<Rat> schedule(const Common& c)
{
    std::vector<Rat> out;
    for (const auto& e : c.eps) {
        Rat r = parse_rat(e);
        if (sgn(r) <= 0) throw std::invalid_argument("eps must be positive, got " + e);
        out.push_back(r);
    }
    if (out.empty()) throw std::invalid_argument("empty eps schedule");
    return out;
}

Iv parse_interval(const std::vector<std::string>& ends)
{
    if (ends.size() != 2) throw std::invalid_argument("an interval needs two endpoints");
    Rat a = parse_rat(ends[0]), b = parse_rat(ends[1]);
    if (b < a) throw std::invalid_argument("interval endpoints out of order: " + ends[0] + " " + ends[1]);
    return Iv(a, b);
}

// --domain if given, else the function's domain, else [0, 1].
Iv default_domain(const FnSpec& f, const std::vector<std::string>& given)
{
    if (!given.empty()) return parse_interval(given);
    return f.domain ? *f.domain : Iv(0, 1);
}

const FnSpec& lookup_fn(const std::string& name)
{
    if (const FnSpec* f = Catalog::instance().find(name)) return *f;
    throw UnknownName("unknown function '" + name + "' (see `gaugekit catalog`)");
}

PointSet parse_set(const std::string& spec)
{
    if (spec == "empty") return PointSet::empty();
    if (spec.starts_with("finite:")) {
        std::vector<Rat> pts;
        std::string_view rest = std::string_view(spec).substr(7);
        while (!rest.empty()) {
            auto comma = rest.find(',');
            pts.push_back(parse_rat(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return PointSet::finite(std::move(pts));
    }
    if (auto g = generated_set_by_name(spec)) return PointSet::generated(*g);
    throw UnknownName("unknown set '" + spec + "' (C, D, S, empty, finite:p,q,...)");
}

// const:R, eps, dist:SET, zero-deriv
GaugeFamily parse_gauge(const std::string& spec, const FnSpec* f, const PointSet* e, const Iv& domain)
{
    if (spec == "eps") return [](const Rat& eps) { return Gauge::constant(eps); };
    if (spec.starts_with("const:")) {
        Gauge g = Gauge::constant(parse_rat(spec.substr(6)));
        return [g](const Rat&) { return g; };
    }
    if (spec.starts_with("dist:")) {
        auto set = generated_set_by_name(spec.substr(5));
        if (!set) throw UnknownName("unknown set in gauge '" + spec + "'");
        Gauge g = gauge_dist_complement(*set);
        return [g](const Rat&) { return g; };
    }
    if (spec == "zero-deriv") {
        if (!f || !e) throw std::invalid_argument("zero-deriv gauge needs --fn and --set");
        Rat len = domain.length();
        return [f = *f, e = *e, len](const Rat& eps) { return gauge_from_zero_derivative(f, e, eps, len); };
    }
    throw UnknownName("unknown gauge '" + spec + "' (eps, const:R, dist:SET, zero-deriv)");
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::string witness_path(const std::string& report) { return report + ".witness.csv"; }

void dump_witness(const std::string& path, const TaggedPartition& p, const FnSpec* f)
{
    auto out = open_out(path);
    write_partition_csv(out, p, nullptr, f);
}

int finish(const std::string& summary, bool matches)
{
    std::cout << summary << '\n';
    return matches ? ok : mismatch;
}

}  // namespace

int run(int argc, char** argv)
{
    CLI::App app{"gaugekit: gauge-integration laboratory"};
    app.require_subcommand(1);

    unsigned depth_cap = 64;
    std::function<int()> action;

    // integrate
    Common ic;
    std::string ifn, igauge = "eps", iexpect, itol = "0";
    std::vector<std::string> idomain;
    auto* integrate = app.add_subcommand("integrate", "sampled Riemann sums of a catalog function");
    add_common(integrate, ic, "integrate.json");
    integrate->add_option("--fn", ifn)->required();
    integrate->add_option("--domain", idomain)->expected(2)->required()->allow_extra_args(false);
    integrate->add_option("--gauge", igauge, "eps | const:R | dist:SET")->capture_default_str();
    integrate->add_option("--tolerance", itol, "convergence tolerance on the final spread")->capture_default_str();
    integrate->add_option("--expect", iexpect, "expected integral; checked against the final eps");
    integrate->callback([&] {
        action = [&] {
            const FnSpec& f = lookup_fn(ifn);
            Iv d = parse_interval(idomain);
            HkOptions o{schedule(ic), ic.samples, ic.seed, parse_rat(itol), ic.max_depth ? ic.max_depth : depth_cap};
            auto report = hk_estimate(f, parse_rat(idomain[0]), parse_rat(idomain[1]), parse_gauge(igauge, &f, nullptr, d), o);
            auto out = open_out(ic.out);
            write_report(out, to_json(report));
            const auto& last = report.rows.back();
            bool matches = true;
            if (!iexpect.empty()) {
                Rat want = parse_rat(iexpect);
                Rat slack = sgn(o.tolerance) > 0 ? o.tolerance : last.eps;
                matches = rat_abs(Rat(last.min - want)) <= slack && rat_abs(Rat(last.max - want)) <= slack;
            }
            return finish("integrate " + ifn + " on " + to_string(d) + ": final eps " + to_string(last.eps) + " sums in [" +
                              to_string(last.min) + ", " + to_string(last.max) + "]" +
                              (report.converged ? " converged" : "") + " -> " + ic.out,
                          matches);
        };
    });

    // partition
    Common pc;
    std::string pgauge = "const:1", pfn;
    std::vector<std::string> pdomain;
    bool prandom = false;
    auto* partition = app.add_subcommand("partition", "build one Cousin partition and dump it as CSV");
    add_common(partition, pc, "partition.csv");
    partition->add_option("--domain", pdomain)->expected(2)->required();
    partition->add_option("--gauge", pgauge, "const:R | dist:SET")->capture_default_str();
    partition->add_option("--fn", pfn, "fill the f_at_tag column");
    partition->add_flag("--random", prandom, "randomized construction under --seed");
    partition->callback([&] {
        action = [&] {
            Iv d = parse_interval(pdomain);
            const FnSpec* f = pfn.empty() ? nullptr : &lookup_fn(pfn);
            Gauge g = parse_gauge(pgauge, f, nullptr, d)(Rat(1));
            std::mt19937_64 rng(row_seed(pc.seed, 0));
            CousinOptions co;
            co.max_depth = pc.max_depth ? pc.max_depth : depth_cap;
            if (prandom) co.rng = &rng;
            auto p = cousin_partition(d, g, co);
            bool valid = validate_partition(p).ok() && is_subordinate(p, g);
            auto out = open_out(pc.out);
            write_partition_csv(out, p, &g, f);
            return finish("partition " + to_string(d) + " under " + g.name() + ": " + std::to_string(p.size()) +
                              " cells, " + (valid ? "valid and subordinate" : "INVALID") + " -> " + pc.out,
                          valid);
        };
    });

    // variation
    Common vc;
    std::string vfn, vset = "empty", vmode = "nv", vgauge, vadversary, vexpect;
    std::vector<std::string> vdomain;
    auto* variation = app.add_subcommand("variation", "negligible (conditional) variation test");
    add_common(variation, vc, "variation.json");
    variation->add_option("--fn", vfn)->required();
    variation->add_option("--set", vset, "C | D | S | empty | finite:p,q")->capture_default_str();
    variation->add_option("--mode", vmode, "nv | ncv")->check(CLI::IsMember({"nv", "ncv"}))->capture_default_str();
    variation->add_option("--domain", vdomain, "defaults to the function's domain")->expected(2);
    variation->add_option("--gauge", vgauge, "dist:SET | zero-deriv | const:R | eps (default by set kind)");
    variation->add_option("--adversary", vadversary, "split:p,q | per-cell | greedy-sign");
    variation->add_option("--expect", vexpect, "NV-evidence | NCV-only-evidence | refuted");
    variation->callback([&] {
        action = [&] {
            const FnSpec& f = lookup_fn(vfn);
            Iv d = default_domain(f, vdomain);
            PointSet e = parse_set(vset).restricted_to(d);
            std::string gspec = vgauge;
            if (gspec.empty()) {
                if (vset != "empty" && generated_set_by_name(vset)) gspec = "dist:" + vset;
                else if (vset.starts_with("finite:") && f.modulus) gspec = "zero-deriv";
                else gspec = "const:1";
            }
            auto family = parse_gauge(gspec, &f, &e, d);
            VariationOptions o{schedule(vc), vc.samples, vc.seed,
                               vmode == "nv" ? VariationMode::nv : VariationMode::ncv,
                               vc.max_depth ? vc.max_depth : depth_cap};
            auto report = test_negligible_variation(f, e, family, d, o);
            std::string wfile = report.witness ? witness_path(vc.out) : "";
            nlohmann::json body = to_json(report, wfile);
            if (report.witness) dump_witness(wfile, report.witness->partition, &f);

            std::string verdict(to_string(report.verdict));
            std::string extra;
            if (!vadversary.empty()) {
                Rat smallest = *std::min_element(o.schedule.begin(), o.schedule.end());
                auto adv = adversarial_variation(f, e, family(smallest), d, parse_strategy(vadversary), o.max_depth);
                std::string afile = vc.out + ".adversary.csv";
                dump_witness(afile, adv.witness, &f);
                body["adversary"] = to_json(adv, afile);
                const ValueWithError& crit = o.mode == VariationMode::nv ? adv.sums.abs_sum : adv.sums.signed_abs;
                if (crit.lower() >= smallest) verdict = std::string(to_string(VariationVerdict::refuted));
                extra = " adversary " + adv.strategy + " abs_sum=" + to_string(adv.sums.abs_sum.value) +
                        " signed_abs=" + to_string(adv.sums.signed_abs.value);
            }
            body["final_verdict"] = verdict;
            auto out = open_out(vc.out);
            write_report(out, body);
            bool matches = vexpect.empty() || vexpect == verdict;
            return finish("variation " + vfn + " on " + e.name() + " over " + to_string(d) + " mode=" + vmode + ": " +
                              verdict + extra + " -> " + vc.out,
                          matches);
        };
    });

    // cov
    Common cc;
    std::string cinst, cexpect;
    std::vector<std::string> cinterval;
    auto* cov = app.add_subcommand("cov", "change-of-variables check on a registered instance");
    add_common(cov, cc, "cov.json");
    cov->add_option("--instance", cinst)->required();
    cov->add_option("--interval", cinterval, "defaults to the instance domain")->expected(2);
    cov->add_option("--expect", cexpect, "holds | fails (default: the instance's declared outcome)");
    cov->callback([&] {
        action = [&] {
            auto inst = cov_instance(cinst);
            if (!inst) throw UnknownName("unknown instance '" + cinst + "'");
            Iv w = cinterval.empty() ? inst->domain : parse_interval(cinterval);
            CovOptions o{schedule(cc), cc.samples, cc.seed, cc.max_depth ? cc.max_depth : depth_cap};
            auto report = cov_check(*inst, w, o);
            std::string wfile = report.witness ? witness_path(cc.out) : "";
            if (report.witness) dump_witness(wfile, *report.witness, nullptr);
            auto out = open_out(cc.out);
            write_report(out, to_json(report, wfile));
            bool want = cexpect.empty() ? report.expected_holds.value_or(true) : cexpect == "holds";
            bool matches = report.verdict != CovVerdict::inconclusive &&
                           (report.verdict == CovVerdict::holds_evidence) == want;
            return finish("cov " + cinst + " on " + to_string(w) + ": " + std::string(to_string(report.verdict)) +
                              " lhs=" + to_string(report.lhs.value) + " ncv_on_B=" +
                              std::string(to_string(report.ncv_on_b->verdict)) + " -> " + cc.out,
                          matches);
        };
    });

    // ftc
    Common fc;
    std::string ffn, fexpect;
    std::vector<std::string> fdomain;
    auto* ftc = app.add_subcommand("ftc", "g(b) - g(a) against sampled sums of g'");
    add_common(ftc, fc, "ftc.json");
    ftc->add_option("--fn", ffn)->required();
    ftc->add_option("--domain", fdomain, "defaults to the function's domain")->expected(2);
    ftc->add_option("--expect", fexpect, "holds | fails")->check(CLI::IsMember({"holds", "fails"}));
    ftc->callback([&] {
        action = [&] {
            const FnSpec& g = lookup_fn(ffn);
            Iv d = default_domain(g, fdomain);
            CovOptions o{schedule(fc), fc.samples, fc.seed, fc.max_depth ? fc.max_depth : depth_cap};
            auto report = ftc_check(g, d, o);
            std::string wfile = report.witness ? witness_path(fc.out) : "";
            if (report.witness) dump_witness(wfile, *report.witness, nullptr);
            auto out = open_out(fc.out);
            write_report(out, to_json(report, wfile));
            bool matches = fexpect.empty() ||
                           (fexpect == "holds" ? report.verdict == CovVerdict::holds_evidence
                                               : report.verdict == CovVerdict::fails);
            return finish("ftc " + ffn + " on " + to_string(d) + ": " + std::string(to_string(report.verdict)) +
                              " lhs=" + to_string(report.lhs.value) + " -> " + fc.out,
                          matches);
        };
    });

    // scan
    Common sc;
    std::string sinst, sgrid, sexpect;
    unsigned slevel = 1;
    auto* scan = app.add_subcommand("scan", "change of variables on every subinterval of a grid");
    add_common(scan, sc, "scan.json");
    scan->add_option("--instance", sinst)->required();
    scan->add_option("--grid", sgrid, "windows as lo:hi separated by commas (default: dyadic cells plus splits)");
    scan->add_option("--level", slevel, "dyadic level of the default grid")->capture_default_str();
    scan->add_option("--expect-nv", sexpect, "refuted | evidence")->check(CLI::IsMember({"refuted", "evidence"}));
    scan->callback([&] {
        action = [&] {
            auto inst = cov_instance(sinst);
            if (!inst) throw UnknownName("unknown instance '" + sinst + "'");
            std::vector<Iv> grid;
            if (sgrid.empty()) {
                grid = default_scan_grid(*inst, slevel);
            } else {
                std::string_view rest = sgrid;
                while (!rest.empty()) {
                    auto comma = rest.find(',');
                    std::string_view w = rest.substr(0, comma);
                    auto colon = w.find(':');
                    if (colon == std::string_view::npos) throw std::invalid_argument("grid window needs lo:hi");
                    grid.push_back(parse_interval({std::string(w.substr(0, colon)), std::string(w.substr(colon + 1))}));
                    if (comma == std::string_view::npos) break;
                    rest = rest.substr(comma + 1);
                }
            }
            CovOptions o{schedule(sc), sc.samples, sc.seed, sc.max_depth ? sc.max_depth : depth_cap};
            auto report = cov_scan_all_subintervals(*inst, grid, o);
            auto out = open_out(sc.out);
            write_report(out, to_json(report));
            std::string refuted_in;
            for (const auto& e : report.entries)
                if (e.verdict != CovVerdict::holds_evidence) refuted_in += " " + to_string(e.interval);
            bool matches = sexpect.empty() || (sexpect == "refuted") == report.nv_refuted;
            return finish("scan " + sinst + ": " + std::to_string(report.entries.size()) + " windows, " +
                              (report.all_hold ? "all hold" : "fails on" + refuted_in) + "; NV on B " +
                              (report.nv_refuted ? "refuted" : "evidence") + " -> " + sc.out,
                          matches);
        };
    });

    // counterexample
    Common xc;
    bool xsvc = false;
    unsigned xn = 10, xcount = 1;
    std::size_t xindex = 0;
    auto* counter = app.add_subcommand("counterexample", "difference-quotient bound of the quartic root of dist(x, S)");
    add_common(counter, xc, "counterexample.json", false);
    counter->add_flag("--svc", xsvc, "the Smith-Volterra-Cantor composite (the only one available)");
    counter->add_option("-n", xn, "depth n >= 1")->capture_default_str();
    counter->add_option("--x-index", xindex, "index into the endpoints of realize(S, n+2)")->capture_default_str();
    counter->add_option("--count", xcount, "check this many consecutive endpoints")->capture_default_str();
    counter->callback([&] {
        action = [&] {
            const GeneratedSet s = GeneratedSet::svc();
            std::vector<Rat> endpoints;
            for (const auto& iv : *s.realize(xn + 2)) {
                endpoints.push_back(iv.lo());
                endpoints.push_back(iv.hi());
            }
            if (xindex + xcount > endpoints.size())
                throw std::invalid_argument("--x-index out of range (" + std::to_string(endpoints.size()) + " endpoints)");
            nlohmann::json checks = nlohmann::json::array();
            bool all_ok = true;
            double min_q = 0;
            for (unsigned i = 0; i < xcount; ++i) {
                auto r = svc_composition_check(xn, endpoints[xindex + i]);
                all_ok = all_ok && r.ok;
                double q = to_double(r.quotient.lower());
                if (i == 0 || q < min_q) min_q = q;
                checks.push_back(to_json(r));
            }
            auto out = open_out(xc.out);
            write_report(out, {{"kind", "counterexample"}, {"set", "S"}, {"n", xn}, {"checks", checks}, {"ok", all_ok}});
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f > %.6f", min_q, std::pow(2.0, (2.0 * xn - 3.0) / 4.0));
            return finish("counterexample S n=" + std::to_string(xn) + ": " + (all_ok ? "ok" : "FAILED") +
                              ", quotient " + buf + " -> " + xc.out,
                          all_ok);
        };
    });

    // catalog
    Common kc;
    std::string kset;
    unsigned kdepth = 3;
    auto* catalog = app.add_subcommand("catalog", "list catalog functions and instances");
    add_common(catalog, kc, "catalog.json", false);
    catalog->add_option("--realize", kset, "also write realize(SET, --depth) as CSV next to the report");
    catalog->add_option("--depth", kdepth)->capture_default_str();
    catalog->callback([&] {
        action = [&] {
            nlohmann::json fns = nlohmann::json::array();
            for (const auto& name : Catalog::instance().names()) {
                fns.push_back(describe(Catalog::instance().at(name)));
                std::cout << name << '\n';
            }
            nlohmann::json body{{"kind", "catalog"}, {"functions", fns}, {"instances", cov_instance_names()}};
            if (!kset.empty()) {
                auto set = generated_set_by_name(kset);
                if (!set) throw UnknownName("unknown set '" + kset + "'");
                std::string path = kc.out + "." + set->name() + ".csv";
                auto csv = open_out(path);
                write_realize_csv(csv, *set, kdepth);
                body["realize_file"] = std::filesystem::path(path).filename().string();
            }
            auto out = open_out(kc.out);
            write_report(out, body);
            return finish("catalog: " + std::to_string(fns.size()) + " functions -> " + kc.out, true);
        };
    });

    try {
        depth_cap = default_depth_cap();
        for (Common* c : {&ic, &pc, &vc, &cc, &fc, &sc, &xc, &kc}) c->max_depth = 0;
        app.parse(argc, argv);
        return action();
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? ok : other_error;
    } catch (const UnknownName& e) {
        std::cerr << "error: " << e.what() << '\n';
        return unknown_name;
    } catch (const PartitionFailure& e) {
        std::cerr << "error: " << e.what() << "\nwitness cell: " << to_string(e.cell) << '\n';
        return partition_failure;
    } catch (const UnsupportedInstance& e) {
        std::cerr << "error: unsupported instance: " << e.what() << '\n';
        return unsupported;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return other_error;
    }
}

}  // namespace gaugekit::cli
