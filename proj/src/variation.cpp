#include "gaugekit/variation.hpp"

#include <algorithm>
#include <random>

namespace gaugekit {

VariationSums variation_sums(const FnSpec& f, const TaggedPartition& p, const PointSet& e)
{
    VariationSums out{ValueWithError::exact_value(0), ValueWithError::exact_value(0), 0};
    ValueWithError signed_sum = ValueWithError::exact_value(0);
    for (const auto& [tag, cell] : p.items()) {
        if (!e.contains(tag)) continue;
        ValueWithError delta = f(cell.hi()) - f(cell.lo());
        out.abs_sum = out.abs_sum + abs(delta);
        signed_sum = signed_sum + delta;
        ++out.tags_in_set;
    }
    out.signed_abs = abs(signed_sum);
    out.abs_sum.by_convention = out.signed_abs.by_convention = false;
    return out;
}

Gauge gauge_dist_complement(const GeneratedSet& set)
{
    PointSet members = PointSet::generated(set);
    return Gauge(
        "dist_complement:" + set.name(),
        [set](const Rat& x) -> Rat {
            auto d = set.distance(x);
            for (unsigned cap = 4 * kDefaultDistanceCap; !d.exact && cap <= (1u << 16); cap *= 4)
                d = set.distance(x, cap);
            if (!d.exact) throw UndecidedMembership("dist_complement: distance at " + to_string(x) + " did not resolve");
            return sgn(d.value()) == 0 ? Rat(1) : d.value();
        },
        [members](const Iv& cell) {
            auto w = members.witnesses_in(cell);
            if (w.empty()) w.push_back(cell.mid());
            return w;
        });
}

Gauge gauge_from_zero_derivative(const FnSpec& f, const PointSet& e, const Rat& eps, const Rat& domain_length)
{
    if (!f.modulus) throw UnsupportedInstance(f.name + ": no modulus certificate");
    if (sgn(eps) <= 0 || sgn(domain_length) <= 0)
        throw std::invalid_argument("gauge_from_zero_derivative: eps and domain length must be positive");
    Rat slope = eps / domain_length;
    return Gauge(
        "zero_derivative:" + f.name + "@" + to_string(eps),
        [f, e, slope](const Rat& x) -> Rat {
            if (!e.contains(x)) return Rat(1);
            auto d = f.derivative_at(x);
            if (d.by_convention || !d.exact() || sgn(d.value) != 0)
                throw UnsupportedInstance(f.name + ": derivative at " + to_string(x) + " is not certified zero");
            auto eta = f.modulus_at(x, slope);
            if (!eta) throw UnsupportedInstance(f.name + ": no modulus at " + to_string(x));
            return rat_min(*eta, Rat(1));
        },
        [e](const Iv& cell) { return e.witnesses_in(cell); });
}

Rat dini_cover_bound(const Rat& eps, unsigned band)
{
    return Rat(eps / (pow2(static_cast<long>(band) + 1) * (band + 2)));
}

Gauge gauge_from_dini(const FnSpec& f, const PointSet& z, const std::map<unsigned, OpenCover>& covers, const Rat& eps)
{
    if (!f.dini) throw UnsupportedInstance(f.name + ": no Dini certificate");
    for (const auto& [band, cover] : covers) {
        Rat bound = dini_cover_bound(eps, band);
        if (!(cover.measure() < bound))
            throw std::invalid_argument("gauge_from_dini: cover for band " + std::to_string(band) + " has measure " +
                                        to_string(cover.measure()) + ", needs < " + to_string(bound));
    }
    auto dini = *f.dini;
    return Gauge(
        "dini:" + f.name + "@" + to_string(eps),
        [f, dini, z, covers](const Rat& x) -> Rat {
            if (!z.contains(x)) return Rat(1);
            auto band = dini.band(x);
            auto eta = dini.eta(x);
            if (!band || !eta) throw UnsupportedInstance(f.name + ": no Dini band at " + to_string(x));
            auto it = covers.find(*band);
            if (it == covers.end())
                throw UnsupportedInstance("gauge_from_dini: no cover for band " + std::to_string(*band));
            if (!it->second.contains(x))
                throw UnsupportedInstance("gauge_from_dini: cover for band " + std::to_string(*band) + " misses " +
                                          to_string(x));
            return rat_min(*eta, it->second.distance_to_complement(x));
        },
        [z](const Iv& cell) { return z.witnesses_in(cell); });
}

std::string_view to_string(VariationMode mode) { return mode == VariationMode::nv ? "nv" : "ncv"; }

std::string_view to_string(VariationVerdict verdict)
{
    switch (verdict) {
    case VariationVerdict::nv_evidence: return "NV-evidence";
    case VariationVerdict::ncv_only_evidence: return "NCV-only-evidence";
    case VariationVerdict::refuted: return "refuted";
    }
    return "unknown";
}

VariationReport test_negligible_variation(const FnSpec& f, const PointSet& e, const GaugeFamily& builder,
                                          const Iv& domain, const VariationOptions& options)
{
    if (options.schedule.empty()) throw std::invalid_argument("test_negligible_variation: empty schedule");
    VariationReport report;
    report.function = f.name;
    report.set = e.name();
    report.domain = domain;
    report.mode = options.mode;
    report.seed = options.seed;

    std::optional<VariationWitness> first_nv_failure, first_ncv_failure;
    for (std::size_t r = 0; r < options.schedule.size(); ++r) {
        const Rat& eps = options.schedule[r];
        Gauge g = builder(eps);
        VariationRow row{eps, g.name(), 0, 0, 0, true, true};
        std::mt19937_64 rng(row_seed(options.seed, r));
        for (unsigned s = 0; s < std::max(1u, options.samples); ++s) {
            CousinOptions co;
            co.max_depth = options.max_depth;
            co.rng = s == 0 ? nullptr : &rng;
            auto p = cousin_partition(domain, g, co);
            auto sums = variation_sums(f, p, e);
            ++row.partitions_tried;
            row.max_abs_sum = rat_max(row.max_abs_sum, sums.abs_sum.upper());
            row.max_signed_abs = rat_max(row.max_signed_abs, sums.signed_abs.upper());
            if (!(sums.abs_sum.upper() < eps)) {
                row.pass_nv = false;
                if (!first_nv_failure) first_nv_failure = VariationWitness{eps, g.name(), p, sums};
            }
            if (!(sums.signed_abs.upper() < eps)) {
                row.pass_ncv = false;
                if (!first_ncv_failure) first_ncv_failure = VariationWitness{eps, g.name(), p, sums};
            }
        }
        report.rows.push_back(std::move(row));
    }

    bool all_nv = std::all_of(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.pass_nv; });
    bool all_ncv = std::all_of(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.pass_ncv; });
    if (all_nv) {
        report.verdict = VariationVerdict::nv_evidence;
    } else if (options.mode == VariationMode::ncv && all_ncv) {
        report.verdict = VariationVerdict::ncv_only_evidence;
        report.witness = first_nv_failure;
    } else {
        report.verdict = VariationVerdict::refuted;
        report.witness = options.mode == VariationMode::nv ? first_nv_failure : first_ncv_failure;
    }
    return report;
}

AdversaryStrategy parse_strategy(std::string_view text)
{
    if (text == "per-cell" || text == "per_cell") return AdversaryStrategy::per_cell();
    if (text == "greedy-sign" || text == "greedy_sign") return AdversaryStrategy::greedy_sign();
    if (text.starts_with("split:") || text.starts_with("split_at:")) {
        std::vector<Rat> points;
        std::string_view rest = text.substr(text.find(':') + 1);
        while (!rest.empty()) {
            auto comma = rest.find(',');
            points.push_back(parse_rat(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (points.empty()) throw std::invalid_argument("split strategy needs at least one point");
        return AdversaryStrategy::split_at(std::move(points));
    }
    throw std::invalid_argument("unknown adversary strategy '" + std::string(text) + "'");
}

std::string to_string(const AdversaryStrategy& s)
{
    switch (s.kind) {
    case AdversaryStrategy::Kind::per_cell_repartition: return "per-cell";
    case AdversaryStrategy::Kind::greedy_sign: return "greedy-sign";
    case AdversaryStrategy::Kind::split_at: break;
    }
    std::string out = "split:";
    for (std::size_t i = 0; i < s.points.size(); ++i) out += (i ? "," : "") + to_string(s.points[i]);
    return out;
}

namespace {

TaggedPartition split_partition(const Iv& domain, const Gauge& delta, std::vector<Rat> points, unsigned max_depth)
{
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::vector<TaggedPartition> parts;
    Rat lo = domain.lo();
    CousinOptions co;
    co.max_depth = max_depth;
    for (const auto& p : points) {
        if (!domain.interior_contains(p)) continue;
        parts.push_back(cousin_partition(Iv(lo, p), delta, co));
        lo = p;
    }
    parts.push_back(cousin_partition(Iv(lo, domain.hi()), delta, co));
    return merge_partitions(parts);
}

Rat contribution(const FnSpec& f, const PointSet& e, const std::vector<TaggedItem>& items)
{
    return variation_sums(f, TaggedPartition(Iv(0, 0), items), e).abs_sum.lower();
}

TaggedPartition per_cell(const FnSpec& f, const PointSet& e, const Gauge& delta, const Iv& domain, unsigned max_depth)
{
    CousinOptions co;
    co.max_depth = max_depth;
    auto base = cousin_partition(domain, delta, co);
    std::vector<TaggedItem> out;
    for (const auto& item : base.items()) {
        std::vector<TaggedItem> best{item};
        Rat best_value = contribution(f, e, best);
        for (const auto& w : e.witnesses_in(item.cell)) {
            if (!item.cell.interior_contains(w)) continue;
            auto left = cousin_partition(Iv(item.cell.lo(), w), delta, co);
            auto right = cousin_partition(Iv(w, item.cell.hi()), delta, co);
            std::vector<TaggedItem> trial = left.items();
            trial.insert(trial.end(), right.items().begin(), right.items().end());
            Rat v = contribution(f, e, trial);
            if (v > best_value) {
                best = std::move(trial);
                best_value = v;
            }
            break;  // nearest witness only
        }
        out.insert(out.end(), best.begin(), best.end());
    }
    return TaggedPartition(domain, std::move(out));
}

TaggedPartition greedy_sign(const FnSpec& f, const PointSet& e, const Gauge& delta, const Iv& domain,
                            unsigned max_depth)
{
    CousinOptions co;
    co.max_depth = max_depth;
    auto base = cousin_partition(domain, delta, co);
    std::vector<TaggedItem> items = base.items();

    // Keep the E-tagged increments of the dominant sign; move the others off
    // E by retagging where the gauge allows it.
    ValueWithError total = ValueWithError::exact_value(0);
    std::vector<ValueWithError> deltas;
    for (const auto& [tag, cell] : items) {
        deltas.push_back(f(cell.hi()) - f(cell.lo()));
        if (e.contains(tag)) total = total + deltas.back();
    }
    int dominant = sgn(total.value) >= 0 ? 1 : -1;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto& [tag, cell] = items[i];
        if (!e.contains(tag) || sgn(deltas[i].value) != -dominant) continue;
        std::vector<Rat> candidates = delta.suggest(cell);
        candidates.insert(candidates.end(), {cell.lo(), cell.hi(), cell.mid()});
        for (const auto& c : candidates) {
            if (!e.contains(c) && fits(delta, c, cell)) {
                tag = c;
                break;
            }
        }
    }
    return TaggedPartition(domain, std::move(items));
}

}  // namespace

AdversarialResult adversarial_variation(const FnSpec& f, const PointSet& e, const Gauge& delta, const Iv& domain,
                                        const AdversaryStrategy& strategy, unsigned max_depth)
{
    try {
        std::optional<TaggedPartition> p;
        switch (strategy.kind) {
        case AdversaryStrategy::Kind::split_at:
            p = split_partition(domain, delta, strategy.points, max_depth);
            break;
        case AdversaryStrategy::Kind::per_cell_repartition: p = per_cell(f, e, delta, domain, max_depth); break;
        case AdversaryStrategy::Kind::greedy_sign: p = greedy_sign(f, e, delta, domain, max_depth); break;
        }
        auto sums = variation_sums(f, *p, e);
        return {std::move(*p), std::move(sums), to_string(strategy)};
    } catch (const PartitionFailure& pf) {
        throw PartitionFailure("adversarial_variation[" + to_string(strategy) + "]: " + pf.what(), pf.cell);
    }
}

NcvScanReport subinterval_ncv_scan(const FnSpec& f, const PointSet& e, const GaugeFamily& builder,
                                   const std::vector<Iv>& grid, const VariationOptions& options)
{
    NcvScanReport out;
    VariationOptions o = options;
    o.mode = VariationMode::ncv;
    for (const auto& window : grid) {
        auto report = test_negligible_variation(f, e.restricted_to(window), builder, window, o);
        if (report.verdict == VariationVerdict::refuted) out.nv_refuted = true;
        out.entries.push_back({window, std::move(report)});
    }
    return out;
}

DiniEstimate dini_upper_estimate(const FnSpec& g, const Rat& x, const std::vector<Rat>& h_grid)
{
    DiniEstimate out{ValueWithError::exact_value(0), std::nullopt, {}};
    ValueWithError gx = g(x);
    for (const auto& h : h_grid) {
        if (sgn(h) <= 0) {
            out.notes.push_back("skipped non-positive h " + to_string(h));
            continue;
        }
        for (const Rat& y : {Rat(x - h), Rat(x + h)}) {
            if (!g.in_domain(y)) {
                out.notes.push_back("skipped " + to_string(y) + " outside domain");
                continue;
            }
            ValueWithError q;
            try {
                q = scale(abs(g(y) - gx), Rat(1 / h));
            } catch (const DomainError&) {
                out.notes.push_back("skipped " + to_string(y) + " outside domain");
                continue;
            }
            if (!out.best_h || q.lower() > out.estimate.lower()) {
                out.estimate = q;
                out.best_h = h;
            }
        }
    }
    out.estimate.by_convention = false;
    return out;
}

Rat image_measure_bound(const FnSpec& g, const PointSet& e, unsigned depth)
{
    if (!g.oscillation) throw UnsupportedInstance(g.name + ": no oscillation certificate");
    std::vector<Iv> cells;
    if (e.kind() == PointSet::Kind::generated) {
        cells = *e.generated_set()->realize(depth);
    } else if (e.kind() == PointSet::Kind::finite) {
        Rat pad = pow2(-static_cast<long>(depth));
        for (const auto& p : e.points()) {
            Iv cell(p - pad, p + pad);
            if (g.domain) {
                auto clipped = cell.intersect(*g.domain);
                if (!clipped) continue;
                cell = *clipped;
            }
            cells.push_back(cell);
        }
    } else if (e.kind() != PointSet::Kind::empty) {
        throw UnsupportedInstance("image_measure_bound: set must be generated or finite");
    }
    Rat total = 0;
    for (const auto& c : cells) {
        auto o = g.oscillation(c);
        if (!o) throw UnsupportedInstance(g.name + ": no oscillation bound on " + to_string(c));
        total += *o;
    }
    return total;
}

}  // namespace gaugekit
