#pragma once

// Scenario runs: pass geometry -> link budget -> photon statistics -> protocol
// results, with requirement verdicts.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "csv.hpp"
#include "gravity.hpp"
#include "keys.hpp"
#include "postprocess.hpp"
#include "qkd.hpp"
#include "scenario.hpp"
#include "teleport.hpp"

namespace skylink {

struct Verdict {
    std::string requirement;
    std::string comparator; // "<=" or ">="
    double threshold = 0.0;
    double measured = 0.0;
    std::string unit;
    bool passed = false;
};

inline Verdict check(std::string requirement, double measured, std::string comparator, double threshold,
                     std::string unit = "") {
    const bool ok = comparator == "<=" ? measured <= threshold : measured >= threshold;
    return {std::move(requirement), std::move(comparator), threshold, measured, std::move(unit), ok};
}

/// Mission requirement table for satellite-to-ground QKD.
inline std::vector<Verdict> qkd_requirements(double min_loss_db, double raw_rate_bps, double qber) {
    return {check("total channel loss", min_loss_db, "<=", 40.0, "dB"),
            check("raw key rate", raw_rate_bps, ">=", 1000.0, "bps"), check("QBER", qber, "<=", 0.035)};
}

inline std::vector<Verdict> entanglement_requirements(double min_loss_db, double coincidences, double fidelity) {
    return {check("total channel loss", min_loss_db, "<=", 80.0, "dB"),
            check("received coincident count", coincidences, ">=", 1000.0),
            check("effective fidelity", fidelity, ">=", 0.85)};
}

inline std::vector<Verdict> teleportation_requirements(double min_loss_db, double coincidences, double fidelity) {
    return {check("total channel loss", min_loss_db, "<=", 55.0, "dB"),
            check("received coincident count", coincidences, ">=", 400.0),
            check("effective fidelity", fidelity, ">=", 0.75)};
}

struct QkdPassResult {
    int pass_id = 0;
    DecoyStats stats;
    SecureKeyResult key;
    std::size_t distilled_bits = 0;
    bool keys_agree = true;
};

struct QkdSummary {
    std::string station;
    std::vector<QkdPassResult> passes;
    double duration_s = 0.0; // per pass
    double sifted_bits = 0.0;
    double errors = 0.0;
    double qber = 0.0;
    double secure_bits_asymptotic = 0.0;
    double secure_bits_finite = 0.0;
    double distilled_bits = 0.0;
    double raw_rate_bps = 0.0;
    double final_rate_bps = 0.0;
    double min_loss_db = 0.0;
    double max_loss_db = 0.0;
    Bytes key_material; // distilled key bytes of every pass, concatenated
};

struct EntanglementSummary {
    double coincidences = 0.0;
    double accidentals = 0.0;
    double snr = 0.0;
    double werner_p = 0.0;
    double fidelity_model = 0.0;
    double fidelity_measured = 0.0;
    double v_zz = 0.0;
    double v_xx = 0.0;
    ChshResult chsh_analytic;
    ChshResult chsh_sampled;
    SecureKeyResult bbm92;
    double min_loss_db = 0.0;
    double max_loss_db = 0.0;
    double duration_s = 0.0;
};

struct TeleportSummary {
    double events = 0.0;
    double accidentals = 0.0;
    TeleportFidelityReport fidelity;
    double min_loss_db = 0.0;
    double max_loss_db = 0.0;
    double duration_s = 0.0;
};

struct GravitySummary {
    double coherence_time_s = 0.0;
    std::vector<DecoherenceEstimate> estimates;
    std::vector<double> predicted_D;
    double uplink_loss_db = 0.0;
    double max_deviation_sigma = 0.0;
};

struct Transfer {
    std::string from;
    std::string to;
    std::size_t bytes = 0;
    std::uint64_t checksum_sent = 0;
    std::uint64_t checksum_received = 0;
    bool ok = false;
};

struct ExchangeTranscript {
    std::string shared_id;
    std::size_t shared_bytes = 0;
    std::vector<std::string> consumed_ids;
    std::vector<Transfer> transfers;
    std::size_t remaining_bytes = 0;

    bool all_ok() const {
        return std::all_of(transfers.begin(), transfers.end(), [](const Transfer& t) { return t.ok; });
    }
};

struct ConstellationSpec {
    int satellites = 3;
    double altitude_km = 900.0;
};

struct ThroughputReport {
    double passes_per_station_per_year = 0.0;
    double key_per_pass_bits = 0.0;
    int stations = 0;
    double per_station_bits_per_year = 0.0;
    double aggregate_bits_per_year = 0.0;
};

struct ConstellationSummary {
    PassStatistics statistics;
    ThroughputReport throughput;
};

struct MissionReport {
    std::string name;
    MissionKind kind = MissionKind::downlink_qkd;
    std::uint64_t seed = 0;

    Table pass;   // per-sample series
    Table budget; // term,efficiency,db at the lowest-loss sample
    std::optional<Table> key_rows; // per-pass key lengths
    std::map<std::string, Table> plots;
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<Verdict> verdicts;
    KeyStore keys;

    std::vector<QkdSummary> qkd;
    std::optional<EntanglementSummary> entanglement;
    std::optional<TeleportSummary> teleport;
    std::optional<GravitySummary> gravity;
    std::optional<ExchangeTranscript> relay;
    std::optional<ConstellationSummary> constellation;

    bool all_passed() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
    }

    void note(const std::string& key, double value) { summary.emplace_back(key, format_number(value)); }
    void note(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
};

namespace detail {

template <typename F>
void parallel_for(std::size_t n, unsigned workers, F&& f) {
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (w == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < w; ++id) {
        pool.emplace_back([&, id] {
            for (std::size_t i = id; i < n; i += w) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline Table budget_table(const LinkBudget& b) {
    Table t{{"term", "efficiency", "db"}, {}};
    for (const auto& term : b.terms()) t.add({std::string(term.name), term.efficiency, to_db(term.efficiency)});
    t.add({std::string("total"), b.total(), b.total_db()});
    return t;
}

/// Loss against elevation from the station cutoff to zenith, 1 deg steps.
inline Table loss_vs_elevation(const Scenario& s, std::size_t station) {
    Table t{{"elevation_deg", "range_km", "total_db"}, {}};
    const auto cfg = s.link_config(station);
    const double h = s.orbit.altitude_m / 1e3;
    const double start = std::max(1.0, std::ceil(s.stations[station].site.min_elevation_deg));
    for (double el = start; el <= 90.0; el += 1.0) {
        const double r = slant_range_km(h, el);
        t.add({el, r, link_loss(cfg, r, el).total_db()});
    }
    return t;
}

struct Sample {
    double t_s;
    double elevation_deg;
    double range_km;
    double rate_mrad_s;
};

inline std::vector<Sample> single_station_samples(const Scenario& s, std::size_t station) {
    std::vector<Sample> out;
    if (s.atmosphere.fixed_loss_db) {
        const auto n = static_cast<std::size_t>(std::floor(s.mission.duration_s / s.mission.step_s + 1e-9));
        for (std::size_t k = 0; k < n; ++k) out.push_back({k * s.mission.step_s, s.mission.max_elevation_deg, 0.0, 0.0});
        return out;
    }
    const auto track = generate_pass(s.orbit_spec(), s.stations.at(station).site, s.mission.max_elevation_deg,
                                     s.mission.step_s);
    for (const auto& p : track.samples) {
        // Rise and set samples sit exactly on the cutoff; zero elevation has no airmass.
        if (p.elevation_deg <= 0.0) continue;
        out.push_back({p.t_s, p.elevation_deg, p.range_km, p.rate_mrad_s});
    }
    return out;
}

inline LinkBudget sample_budget(const Scenario& s, std::size_t station, const Sample& p) {
    if (s.atmosphere.fixed_loss_db) return LinkBudget::from_total(from_db(-*s.atmosphere.fixed_loss_db));
    return link_loss(s.link_config(station), p.range_km, p.elevation_deg);
}

inline std::uint64_t sample_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t pass, std::uint64_t k) {
    return derive_seed(derive_seed(derive_seed(master, tag), pass), k);
}

/// Sifted bit strings with exactly `errors` disagreements.
inline std::pair<Bits, Bits> sifted_strings(std::size_t n, std::size_t errors, Rng& rng) {
    Bits alice = random_bits(n, rng);
    Bits bob = alice;
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    errors = std::min(errors, n);
    for (std::size_t i = 0; i < errors; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(idx[i], idx[j]);
        bob[idx[i]] ^= 1u;
    }
    return {std::move(alice), std::move(bob)};
}

inline std::size_t signal_index(const DecoyStats& st) {
    std::size_t s = 0;
    for (std::size_t i = 1; i < 3; ++i) {
        if (st.intensities[i] > st.intensities[s]) s = i;
    }
    return s;
}

} // namespace detail

/// Sifted keys are reconciled and compressed in blocks of this size, each
/// block compressed to its share of the pass's finite-key length.
inline constexpr std::size_t distill_block_bits = 1u << 16;

/// Decoy-state BB84 over every pass for one station. Each sample draws its
/// counts from its own derived seed.
inline QkdSummary run_downlink_qkd(const Scenario& s, std::size_t station, std::uint64_t tag, Table* series = nullptr,
                                   LinkBudget* best_budget = nullptr) {
    const auto samples = detail::single_station_samples(s, station);
    require(!samples.empty(), ErrorKind::no_visibility, "pass has no usable samples");
    const WcpSource wcp = s.wcp_source();
    const DetectorModel det = s.detector_model();
    const SyncModel sync = s.sync_model();
    const double window = window_efficiency(sync);
    const double p_noise = detail::noise_probability(det, sync, s.background_cps(station));
    const auto pulses = static_cast<std::uint64_t>(std::llround(wcp.rep_rate_hz * s.mission.step_s));

    std::vector<LinkBudget> budgets(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) budgets[k] = detail::sample_budget(s, station, samples[k]);

    QkdSummary out;
    out.station = s.stations[station].site.name;
    out.duration_s = static_cast<double>(samples.size()) * s.mission.step_s;
    out.min_loss_db = 1e300;
    out.max_loss_db = -1e300;
    std::size_t best = 0;
    for (std::size_t k = 0; k < budgets.size(); ++k) {
        const double loss = -budgets[k].total_db();
        if (loss < out.min_loss_db) best = k;
        out.min_loss_db = std::min(out.min_loss_db, loss);
        out.max_loss_db = std::max(out.max_loss_db, loss);
    }
    if (best_budget) *best_budget = budgets[best];

    DecoyStats total;
    total.intensities = wcp.intensities;
    Rng key_rng(derive_seed(derive_seed(s.seeds.master, tag), 0xC0FFEE));
    for (int p = 0; p < s.mission.passes; ++p) {
        std::vector<DecoyStats> per(samples.size());
        detail::parallel_for(samples.size(), s.mission.workers, [&](std::size_t k) {
            Rng rng(detail::sample_seed(s.seeds.master, tag, static_cast<std::uint64_t>(p), k));
            const double eta = budgets[k].total() * det.efficiency * window;
            per[k] = sample_decoy_stats(wcp, eta, p_noise, s.protocol.misalignment, pulses, rng);
        });
        QkdPassResult pr;
        pr.pass_id = p;
        pr.stats.intensities = wcp.intensities;
        for (std::size_t k = 0; k < per.size(); ++k) {
            pr.stats += per[k];
            if (series) {
                const double sifted = per[k].sifted();
                series->add({static_cast<double>(p), samples[k].t_s, samples[k].elevation_deg, samples[k].range_km,
                             samples[k].rate_mrad_s, budgets[k].total_db(), sifted / s.mission.step_s,
                             sifted > 0.0 ? per[k].qber() : 0.0});
            }
        }
        pr.key = secure_key_length(pr.stats, s.protocol.f_ec, s.protocol.epsilon);

        // Reconcile and compress the signal-intensity sifted block.
        const auto& sig = pr.stats.counts[detail::signal_index(pr.stats)];
        const auto n = static_cast<std::size_t>(sig.sifted);
        if (n > 0 && pr.key.secure_bits_finite > 0.0) {
            auto [alice, bob] = detail::sifted_strings(n, static_cast<std::size_t>(sig.errors), key_rng);
            const double q = std::max(sig.errors / sig.sifted, 1e-3);
            const auto pass_seed = key_rng();
            const std::size_t blocks = (n + distill_block_bits - 1) / distill_block_bits;
            std::vector<DistilledKey> parts(blocks);
            std::vector<char> failed(blocks, 0);
            detail::parallel_for(blocks, s.mission.workers, [&](std::size_t b) {
                const std::size_t lo = b * distill_block_bits;
                const std::size_t hi = std::min(n, lo + distill_block_bits);
                const Bits a(alice.begin() + lo, alice.begin() + hi);
                const Bits c(bob.begin() + lo, bob.begin() + hi);
                const auto target = static_cast<std::size_t>(pr.key.secure_bits_finite * (hi - lo) / n);
                try {
                    parts[b] = distill_key(a, c, target, q, derive_seed(pass_seed, b));
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::reconciliation_failure) throw;
                    failed[b] = 1;
                }
            });
            Bits key;
            for (std::size_t b = 0; b < blocks; ++b) {
                if (failed[b] || parts[b].alice != parts[b].bob) {
                    pr.keys_agree = false;
                    continue;
                }
                key.insert(key.end(), parts[b].alice.begin(), parts[b].alice.end());
            }
            pr.distilled_bits = key.size();
            key.resize(key.size() / 8 * 8);
            const auto bytes = pack_bits(key);
            out.key_material.insert(out.key_material.end(), bytes.begin(), bytes.end());
        }
        total += pr.stats;
        out.secure_bits_asymptotic += pr.key.secure_bits_asymptotic;
        out.secure_bits_finite += pr.key.secure_bits_finite;
        out.distilled_bits += static_cast<double>(pr.distilled_bits);
        out.passes.push_back(pr);
    }
    out.sifted_bits = total.sifted();
    out.errors = 0.0;
    for (const auto& c : total.counts) out.errors += c.errors;
    out.qber = out.sifted_bits > 0.0 ? out.errors / out.sifted_bits : 0.0;
    const double time = out.duration_s * s.mission.passes;
    out.raw_rate_bps = out.sifted_bits / time;
    out.final_rate_bps = out.secure_bits_finite / time;
    return out;
}

/// Throughput of a constellation from per-pass key and pass counts.
inline ThroughputReport constellation_throughput(const ConstellationSpec& plan, int stations, double passes_per_year,
                                                 double key_per_pass_bits) {
    require(plan.satellites >= 1, ErrorKind::domain, "constellation needs at least one satellite");
    require(stations >= 1, ErrorKind::domain, "constellation needs at least one station");
    ThroughputReport r;
    r.stations = stations;
    r.passes_per_station_per_year = passes_per_year;
    r.key_per_pass_bits = key_per_pass_bits;
    r.per_station_bits_per_year = passes_per_year * key_per_pass_bits;
    r.aggregate_bits_per_year = r.per_station_bits_per_year * stations;
    return r;
}

/// Trusted-relay exchange: the satellite publishes MX xor MG, station A
/// recovers MG, then the stations exchange one-time-pad payloads in turn
/// (A to B, B to A, ...). `tamper_broadcast` flips one broadcast bit.
inline ExchangeTranscript intercontinental_demo(KeyStore& store, const std::string& mx_id, const std::string& mg_id,
                                                const std::vector<std::size_t>& payload_bytes, std::uint64_t seed,
                                                bool tamper_broadcast = false) {
    const KeyMaterial mx = store.get(mx_id);
    const KeyMaterial mg = store.get(mg_id);
    require(!mx.bytes.empty() && !mg.bytes.empty(), ErrorKind::insufficient_key, "relay keys are empty");
    require(mx.bytes.size() == mg.bytes.size(), ErrorKind::length_mismatch, "relay keys differ in length");
    const std::size_t need = std::accumulate(payload_bytes.begin(), payload_bytes.end(), std::size_t{0});
    require(need <= mx.bytes.size(), ErrorKind::insufficient_key,
            "payloads need " + std::to_string(need) + " bytes, relay key holds " + std::to_string(mx.bytes.size()));

    const std::string a = mx.owners.first;
    const std::string b = mg.owners.first;
    store.consume(mx_id);
    store.consume(mg_id);
    auto relay = relay_exchange(mx.bytes, mg.bytes);
    if (tamper_broadcast) {
        relay.broadcast[0] ^= 0x01;
        for (std::size_t i = 0; i < mx.bytes.size(); ++i) relay.recovered[i] = relay.broadcast[i] ^ mx.bytes[i];
    }

    ExchangeTranscript tr;
    tr.shared_id = a + "-" + b;
    tr.shared_bytes = mx.bytes.size();
    tr.consumed_ids = {mx_id, mg_id};
    const std::string id_a = tr.shared_id + "@" + a;
    const std::string id_b = tr.shared_id + "@" + b;
    store.add(KeyMaterial{id_a, relay.recovered, {a, b}, {"relay:" + mx_id, "relay:" + mg_id}, false});
    store.add(KeyMaterial{id_b, mg.bytes, {a, b}, {"relay:" + mg_id}, false});

    Rng rng(seed);
    for (std::size_t i = 0; i < payload_bytes.size(); ++i) {
        const bool forward = i % 2 == 0;
        const std::string& sender_id = forward ? id_a : id_b;
        const std::string& receiver_id = forward ? id_b : id_a;
        const std::string tag = ":msg" + std::to_string(i);
        store.split(sender_id, payload_bytes[i], sender_id + tag);
        store.split(receiver_id, payload_bytes[i], receiver_id + tag);

        Bytes message(payload_bytes[i]);
        for (auto& byte : message) byte = static_cast<std::uint8_t>(rng() & 0xFF);
        const Bytes cipher = store.encrypt(sender_id + tag, message);
        const Bytes plain = otp_crypt(cipher, store.consume(receiver_id + tag));

        Transfer t;
        t.from = forward ? a : b;
        t.to = forward ? b : a;
        t.bytes = payload_bytes[i];
        t.checksum_sent = fnv1a(message);
        t.checksum_received = fnv1a(plain);
        t.ok = t.checksum_sent == t.checksum_received;
        tr.consumed_ids.push_back(sender_id + tag);
        tr.consumed_ids.push_back(receiver_id + tag);
        tr.transfers.push_back(t);
    }
    tr.remaining_bytes = store.get(id_a).bytes.size();
    return tr;
}

namespace detail {

inline void qkd_notes(MissionReport& r, const QkdSummary& q, const std::string& prefix) {
    r.note(prefix + "channel_loss_min_db", q.min_loss_db);
    r.note(prefix + "channel_loss_max_db", q.max_loss_db);
    r.note(prefix + "pass_duration_s", q.duration_s);
    r.note(prefix + "sifted_bits", q.sifted_bits);
    r.note(prefix + "qber", q.qber);
    r.note(prefix + "raw_key_rate_bps", q.raw_rate_bps);
    r.note(prefix + "secure_bits_asymptotic", q.secure_bits_asymptotic);
    r.note(prefix + "secure_bits_finite", q.secure_bits_finite);
    r.note(prefix + "final_key_rate_bps", q.final_rate_bps);
    r.note(prefix + "distilled_bits", q.distilled_bits);
}

inline Table qkd_series_header() {
    return {{"pass_id", "t_s", "elevation_deg", "range_km", "rate_mrad_s", "total_db", "sifted_rate_bps", "qber"}, {}};
}

inline Table key_table() { return {{"pass_id", "sifted", "qber", "secure_asym", "secure_finite"}, {}}; }

inline void add_key_rows(Table& t, const QkdSummary& q) {
    for (const auto& p : q.passes) {
        t.add({static_cast<double>(p.pass_id), p.key.sifted_bits, p.key.qber, p.key.secure_bits_asymptotic,
               p.key.secure_bits_finite});
    }
}

inline Table loss_profile(const Table& series) {
    Table t{{"t_s", "elevation_deg", "total_db"}, {}};
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        if (series.number(i, "pass_id") != 0.0) continue;
        t.add({series.number(i, "t_s"), series.number(i, "elevation_deg"), series.number(i, "total_db")});
    }
    return t;
}

inline Table pass_track(const Table& series) {
    Table t{{"t_s", "elevation_deg", "range_km", "rate_mrad_s"}, {}};
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        if (series.number(i, "pass_id") != 0.0) continue;
        t.add({series.number(i, "t_s"), series.number(i, "elevation_deg"), series.number(i, "range_km"),
               series.number(i, "rate_mrad_s")});
    }
    return t;
}

inline void run_qkd(const Scenario& s, MissionReport& r) {
    r.pass = qkd_series_header();
    LinkBudget best;
    auto q = run_downlink_qkd(s, 0, 0, &r.pass, &best);
    r.budget = budget_table(best);
    Table keys = key_table();
    add_key_rows(keys, q);
    r.key_rows = keys;
    r.plots["loss_profile.csv"] = loss_profile(r.pass);
    if (!s.atmosphere.fixed_loss_db) {
        r.plots["pass_track.csv"] = pass_track(r.pass);
        r.plots["loss_vs_elevation.csv"] = loss_vs_elevation(s, 0);
    }
    qkd_notes(r, q, "");
    r.verdicts = qkd_requirements(q.min_loss_db, q.raw_rate_bps, q.qber);
    if (!q.key_material.empty()) {
        r.keys.add(KeyMaterial{q.station, q.key_material, {q.station, "satellite"}, {"qkd:" + q.station}, false});
    }
    r.qkd.push_back(std::move(q));
}

/// Fidelity and time to 1000 coincidences against total two-link loss, for
/// the scenario's source, detectors and background.
inline Table entanglement_tradeoff(const Scenario& s) {
    Table t{{"total_db", "fidelity", "time_s"}, {}};
    const auto src = s.spdc_source();
    const auto det = s.detector_model();
    const auto sync = s.sync_model();
    const double p_src = (4.0 * src.fidelity - 1.0) / 3.0;
    for (double db = 50.0; db <= 90.0; db += 2.0) {
        const double eta = from_db(-0.5 * db);
        const auto c = coincidence_rates(src, eta, eta, det, det, sync, s.background_cps(0), s.background_cps(1));
        const double p = p_src * c.coincidences / (c.coincidences + c.accidentals);
        t.add({-db, (1.0 + 3.0 * p) / 4.0, 1000.0 / (c.coincidences + c.accidentals)});
    }
    return t;
}

inline void run_entanglement(const Scenario& s, MissionReport& r) {
    const auto track = generate_dual_pass(s.orbit_spec(), s.stations[0].site, s.stations[1].site,
                                          s.mission.baseline_m / 1e3, s.mission.cross_track_m / 1e3, s.mission.step_s);
    const auto src = s.spdc_source();
    const auto det = s.detector_model();
    const auto sync = s.sync_model();
    const auto cfg_a = s.link_config(0);
    const auto cfg_b = s.link_config(1);

    std::vector<DualPassSample> samples;
    for (const auto& p : track.samples) {
        if (p.elevation_a_deg > 0.0 && p.elevation_b_deg > 0.0) samples.push_back(p);
    }
    require(!samples.empty(), ErrorKind::no_visibility, "no common-view samples");

    struct Row {
        LinkBudget a, b;
        CountRecord rates;
    };
    std::vector<Row> rows(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        rows[k].a = link_loss(cfg_a, samples[k].range_a_km, samples[k].elevation_a_deg);
        rows[k].b = link_loss(cfg_b, samples[k].range_b_km, samples[k].elevation_b_deg);
        rows[k].rates = coincidence_rates(src, rows[k].a.total(), rows[k].b.total(), det, det, sync,
                                          s.background_cps(0), s.background_cps(1));
    }

    EntanglementSummary e;
    e.duration_s = static_cast<double>(samples.size()) * s.mission.step_s;
    e.min_loss_db = 1e300;
    e.max_loss_db = -1e300;
    std::size_t best = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double loss = -to_db(rows[k].a.total() * rows[k].b.total());
        if (loss < e.min_loss_db) best = k;
        e.min_loss_db = std::min(e.min_loss_db, loss);
        e.max_loss_db = std::max(e.max_loss_db, loss);
    }
    r.budget = budget_table(LinkBudget::combine(rows[best].a, rows[best].b));

    r.pass = Table{{"pass_id", "t_s", "elevation_a_deg", "range_a_km", "elevation_b_deg", "range_b_km", "total_db",
                    "coincidence_rate_hz", "accidental_rate_hz", "snr"},
                   {}};
    for (int p = 0; p < s.mission.passes; ++p) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> counts(rows.size());
        parallel_for(rows.size(), s.mission.workers, [&](std::size_t k) {
            Rng rng(sample_seed(s.seeds.master, 1, static_cast<std::uint64_t>(p), k));
            counts[k] = {rng.poisson(rows[k].rates.coincidences * s.mission.step_s),
                         rng.poisson(rows[k].rates.accidentals * s.mission.step_s)};
        });
        for (std::size_t k = 0; k < rows.size(); ++k) {
            e.coincidences += static_cast<double>(counts[k].first);
            e.accidentals += static_cast<double>(counts[k].second);
            r.pass.add({static_cast<double>(p), samples[k].t_s, samples[k].elevation_a_deg, samples[k].range_a_km,
                        samples[k].elevation_b_deg, samples[k].range_b_km,
                        to_db(rows[k].a.total() * rows[k].b.total()), rows[k].rates.coincidences,
                        rows[k].rates.accidentals, rows[k].rates.snr});
        }
    }
    const double all = e.coincidences + e.accidentals;
    e.snr = e.accidentals > 0.0 ? e.coincidences / e.accidentals : 0.0;
    const double p_src = (4.0 * src.fidelity - 1.0) / 3.0;
    e.werner_p = all > 0.0 ? p_src * e.coincidences / all : 0.0;
    e.fidelity_model = (1.0 + 3.0 * e.werner_p) / 4.0;

    // Half the events in each of the H/V and diagonal bases.
    Rng rng(derive_seed(s.seeds.master, 2));
    const auto n_all = static_cast<std::uint64_t>(all);
    const std::uint64_t n_zz = n_all / 2;
    const std::uint64_t n_xx = n_all - n_zz;
    const double p_same = 0.5 * (1.0 + e.werner_p);
    if (n_zz > 0 && n_xx > 0) {
        e.v_zz = 2.0 * static_cast<double>(rng.binomial(n_zz, p_same)) / static_cast<double>(n_zz) - 1.0;
        e.v_xx = 2.0 * static_cast<double>(rng.binomial(n_xx, p_same)) / static_cast<double>(n_xx) - 1.0;
        e.fidelity_measured = fidelity_from_visibilities(e.v_zz, e.v_xx);
    }
    const auto state = TwoQubitState::werner(std::max(0.0, e.werner_p));
    e.chsh_analytic = chsh_analytic(state);
    if (n_all > 0) e.chsh_sampled = chsh_sampled(state, ChshSettings{}, n_all, derive_seed(s.seeds.master, 3),
                                                 s.mission.workers);
    const double sifted = static_cast<double>(rng.binomial(n_all, 0.5));
    e.bbm92 = bbm92_key_length(sifted, 0.5 * (1.0 - e.werner_p), s.protocol.f_ec, s.protocol.epsilon);

    Table bell{{"setting_a", "setting_b", "E", "stderr"}, {}};
    const auto pairs = ChshSettings{}.pairs();
    for (std::size_t k = 0; k < 4; ++k) {
        bell.add({pairs[k].first * constants::rad_to_deg, pairs[k].second * constants::rad_to_deg,
                  e.chsh_sampled.E[k], e.chsh_sampled.E_stderr[k]});
    }
    r.plots["bell.csv"] = bell;
    Table profile{{"t_s", "elevation_deg", "total_db"}, {}};
    for (std::size_t k = 0; k < rows.size(); ++k) {
        profile.add({samples[k].t_s, std::min(samples[k].elevation_a_deg, samples[k].elevation_b_deg),
                     to_db(rows[k].a.total() * rows[k].b.total())});
    }
    r.plots["loss_profile.csv"] = profile;
    r.plots["loss_vs_elevation.csv"] = loss_vs_elevation(s, 0);
    r.plots["fidelity_vs_loss.csv"] = entanglement_tradeoff(s);

    r.note("channel_loss_min_db", e.min_loss_db);
    r.note("channel_loss_max_db", e.max_loss_db);
    r.note("pass_duration_s", e.duration_s);
    r.note("coincidences", e.coincidences);
    r.note("accidentals", e.accidentals);
    r.note("snr", e.snr);
    r.note("werner_p", e.werner_p);
    r.note("fidelity_model", e.fidelity_model);
    r.note("fidelity_measured", e.fidelity_measured);
    r.note("chsh_S_analytic", e.chsh_analytic.S);
    r.note("chsh_S_sampled", e.chsh_sampled.S);
    r.note("chsh_stderr", e.chsh_sampled.standard_error);
    r.note("bbm92_sifted_bits", e.bbm92.sifted_bits);
    r.note("bbm92_secure_bits_asymptotic", e.bbm92.secure_bits_asymptotic);
    r.note("bbm92_secure_bits_finite", e.bbm92.secure_bits_finite);
    r.verdicts = entanglement_requirements(e.min_loss_db, all, e.fidelity_measured);
    r.entanglement = e;
}

inline void run_teleportation(const Scenario& s, MissionReport& r) {
    const auto samples = single_station_samples(s, 0);
    require(!samples.empty(), ErrorKind::no_visibility, "pass has no usable samples");
    const auto det = s.detector_model();
    const auto sync = s.sync_model();
    // Four-fold events: each successful ground BSM heralds one photon on the uplink.
    const double herald_hz = s.source.pair_rate_hz;
    const double accidental_hz = herald_hz * (det.dark_rate_cps + s.background_cps(0)) * sync.window_s;

    TeleportSummary t;
    t.duration_s = static_cast<double>(samples.size()) * s.mission.step_s;
    t.min_loss_db = 1e300;
    t.max_loss_db = -1e300;
    std::vector<LinkBudget> budgets(samples.size());
    std::size_t best = 0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        budgets[k] = sample_budget(s, 0, samples[k]);
        const double loss = -budgets[k].total_db();
        if (loss < t.min_loss_db) best = k;
        t.min_loss_db = std::min(t.min_loss_db, loss);
        t.max_loss_db = std::max(t.max_loss_db, loss);
    }
    r.budget = budget_table(budgets[best]);
    r.pass = Table{{"pass_id", "t_s", "elevation_deg", "range_km", "rate_mrad_s", "total_db", "event_rate_hz"}, {}};
    const double window = window_efficiency(sync);
    for (int p = 0; p < s.mission.passes; ++p) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> counts(samples.size());
        parallel_for(samples.size(), s.mission.workers, [&](std::size_t k) {
            Rng rng(sample_seed(s.seeds.master, 4, static_cast<std::uint64_t>(p), k));
            const double rate = herald_hz * budgets[k].total() * det.efficiency * window;
            counts[k] = {rng.poisson(rate * s.mission.step_s), rng.poisson(accidental_hz * s.mission.step_s)};
        });
        for (std::size_t k = 0; k < samples.size(); ++k) {
            t.events += static_cast<double>(counts[k].first);
            t.accidentals += static_cast<double>(counts[k].second);
            r.pass.add({static_cast<double>(p), samples[k].t_s, samples[k].elevation_deg, samples[k].range_km,
                        samples[k].rate_mrad_s, budgets[k].total_db(),
                        herald_hz * budgets[k].total() * det.efficiency * window});
        }
    }
    const double all = t.events + t.accidentals;
    TeleportNoise noise;
    noise.channel = TwoQubitState::from_fidelity(s.source.fidelity);
    noise.bsm_visibility = s.protocol.bsm_visibility;
    noise.accidental_fraction = all > 0.0 ? t.accidentals / all : 0.0;
    noise.mode = s.protocol.bsm_mode;
    if (all >= 1.0) t.fidelity = teleport_fidelity_experiment(noise, static_cast<std::uint64_t>(all),
                                                              derive_seed(s.seeds.master, 5));

    Table fid{{"input_state", "F", "stderr"}, {}};
    for (const auto& st : t.fidelity.states) fid.add({st.label, st.fidelity, st.stderr_});
    fid.add({std::string("mean"), t.fidelity.mean_fidelity, t.fidelity.mean_stderr});
    fid.add({std::string("classical_limit"), t.fidelity.classical_limit, 0.0});
    r.plots["fidelity.csv"] = fid;
    Table profile{{"t_s", "elevation_deg", "total_db"}, {}};
    for (std::size_t k = 0; k < samples.size(); ++k) {
        profile.add({samples[k].t_s, samples[k].elevation_deg, budgets[k].total_db()});
    }
    r.plots["loss_profile.csv"] = profile;
    if (!s.atmosphere.fixed_loss_db) {
        r.plots["loss_vs_elevation.csv"] = loss_vs_elevation(s, 0);
        r.plots["pass_track.csv"] = pass_track(r.pass);
    }

    r.note("channel_loss_min_db", t.min_loss_db);
    r.note("channel_loss_max_db", t.max_loss_db);
    r.note("pass_duration_s", t.duration_s);
    r.note("events", t.events);
    r.note("accidentals", t.accidentals);
    r.note("mean_fidelity", t.fidelity.mean_fidelity);
    r.note("mean_fidelity_stderr", t.fidelity.mean_stderr);
    r.note("classical_limit", t.fidelity.classical_limit);
    r.verdicts = teleportation_requirements(t.min_loss_db, all, t.fidelity.mean_fidelity);
    r.teleport = t;
}

inline void run_gravity(const Scenario& s, MissionReport& r) {
    GravitySummary g;
    const EarthModel earth;
    g.coherence_time_s = calibrate_coherence_time(earth, s.orbit.altitude_m, s.protocol.reference_angle_deg,
                                                  s.protocol.reference_decorrelation);
    EventFormalismParams model{g.coherence_time_s, s.orbit.altitude_m, DeltaTFormulation::local_clock, earth};

    DecoherenceExperiment x;
    x.altitude_m = s.orbit.altitude_m;
    x.pair_rate_hz = s.source.pair_rate_hz;
    x.bin_duration_s = s.mission.duration_s;
    x.eta_path2 = s.detectors.efficiency;
    if (s.atmosphere.fixed_loss_db) {
        g.uplink_loss_db = *s.atmosphere.fixed_loss_db;
    } else {
        const double th = s.protocol.reference_angle_deg;
        g.uplink_loss_db = -link_loss(s.link_config(0), slant_range_km(s.orbit.altitude_m / 1e3, th), th).total_db();
    }
    x.uplink_loss_db = g.uplink_loss_db;
    const double injected = s.protocol.injected_decorrelation;
    const auto bins = simulate_decoherence_counts(x, [injected](double) { return injected; }, s.seeds.master);

    Table est{{"theta_deg", "D_epr", "D_epr_err", "D_coh", "D_coh_err", "D_event"}, {}};
    r.pass = Table{{"theta_deg", "epr_coincidences", "epr_satellite", "coh_coincidences", "coh_satellite", "coh_path3"},
                   {}};
    for (const auto& b : bins) {
        const auto e = decorrelation_estimators(b);
        const double pred = model.D(b.theta_deg);
        g.estimates.push_back(e);
        g.predicted_D.push_back(pred);
        g.max_deviation_sigma = std::max(g.max_deviation_sigma, std::abs(e.D_epr.value - 1.0) / e.D_epr.error);
        est.add({b.theta_deg, e.D_epr.value, e.D_epr.error, e.D_coh.value, e.D_coh.error, pred});
        r.pass.add({b.theta_deg, b.epr_coincidences, b.epr_satellite, b.coh_coincidences, b.coh_satellite, b.coh_path3});
    }
    Table sweep{{"theta_deg", "delta_t_s", "D"}, {}};
    for (const auto& row : decoherence_sweep(model, 10.0, 90.0, 1.0)) sweep.add({row.theta_deg, row.delta_t_s, row.D});
    r.plots["decoherence.csv"] = sweep;
    r.plots["estimators.csv"] = est;
    r.budget = budget_table(LinkBudget::from_total(from_db(-g.uplink_loss_db)));

    r.note("coherence_time_s", g.coherence_time_s);
    r.note("uplink_loss_db", g.uplink_loss_db);
    r.note("delta_t_zenith_local_s", delta_t(earth, s.orbit.altitude_m, 90.0, DeltaTFormulation::local_clock));
    r.note("delta_t_zenith_general_s", delta_t(earth, s.orbit.altitude_m, 90.0, DeltaTFormulation::general));
    r.note("max_deviation_sigma", g.max_deviation_sigma);
    r.verdicts = {check("entangled-pair decorrelation vs standard theory", g.max_deviation_sigma, "<=", 3.0, "sigma")};
    r.gravity = g;
}

inline void run_relay(const Scenario& s, MissionReport& r) {
    r.pass = qkd_series_header();
    r.pass.header.insert(r.pass.header.begin(), "station");
    Table keys = key_table();
    keys.header.insert(keys.header.begin(), "station");
    std::vector<QkdSummary> q;
    for (std::size_t i = 0; i < 2; ++i) {
        Table series = qkd_series_header();
        LinkBudget best;
        q.push_back(run_downlink_qkd(s, i, 10 + i, &series, &best));
        if (i == 0) r.budget = budget_table(best);
        for (auto row : series.rows) {
            row.insert(row.begin(), s.stations[i].site.name);
            r.pass.rows.push_back(row);
        }
        Table k = key_table();
        add_key_rows(k, q.back());
        for (auto row : k.rows) {
            row.insert(row.begin(), s.stations[i].site.name);
            keys.rows.push_back(row);
        }
        qkd_notes(r, q.back(), q.back().station + ".");
    }
    r.key_rows = keys;

    const std::size_t budget = std::min({q[0].key_material.size(), q[1].key_material.size(),
                                         static_cast<std::size_t>(s.protocol.key_budget_bits / 8.0)});
    const std::string a = q[0].station;
    const std::string b = q[1].station;
    std::vector<std::size_t> payloads;
    for (double bits : s.protocol.payload_bits) payloads.push_back(static_cast<std::size_t>(bits / 8.0));
    r.keys.add(KeyMaterial{"M-" + a, Bytes(q[0].key_material.begin(), q[0].key_material.begin() + budget),
                           {a, "satellite"}, {"qkd:" + a}, false});
    r.keys.add(KeyMaterial{"M-" + b, Bytes(q[1].key_material.begin(), q[1].key_material.begin() + budget),
                           {b, "satellite"}, {"qkd:" + b}, false});
    r.note("relay_key_bytes", static_cast<double>(budget));
    std::size_t need = std::accumulate(payloads.begin(), payloads.end(), std::size_t{0});
    if (budget == 0 || budget < need) {
        r.verdicts.push_back(check("relay key available", static_cast<double>(budget), ">=",
                                   static_cast<double>(std::max<std::size_t>(need, 1)), "B"));
    } else {
        auto tr = intercontinental_demo(r.keys, "M-" + a, "M-" + b, payloads, derive_seed(s.seeds.master, 6));
        Table transfers{{"from", "to", "bytes", "checksum_sent", "checksum_received", "ok"}, {}};
        for (std::size_t i = 0; i < tr.transfers.size(); ++i) {
            const auto& t = tr.transfers[i];
            char hs[24], hr[24];
            std::snprintf(hs, sizeof hs, "%016llx", static_cast<unsigned long long>(t.checksum_sent));
            std::snprintf(hr, sizeof hr, "%016llx", static_cast<unsigned long long>(t.checksum_received));
            transfers.add({t.from, t.to, static_cast<double>(t.bytes), std::string(hs), std::string(hr),
                           std::string(t.ok ? "true" : "false")});
            r.verdicts.push_back(check("payload " + std::to_string(i) + " " + t.from + "->" + t.to + " round trip",
                                       t.ok ? 1.0 : 0.0, ">=", 1.0));
        }
        r.plots["transfers.csv"] = transfers;
        r.note("remaining_key_bytes", static_cast<double>(tr.remaining_bytes));
        r.relay = tr;
    }
    r.qkd = std::move(q);
}

inline void run_constellation(const Scenario& s, MissionReport& r) {
    std::vector<OrbitSpec> orbits(static_cast<std::size_t>(s.orbit.satellites), s.orbit_spec());
    ConstellationSummary c;
    c.statistics = pass_statistics(orbits, s.stations[0].site, s.protocol.days,
                                   {derive_seed(s.seeds.master, 7), NightSide::ascending, s.mission.workers});
    double per_pass = s.protocol.key_per_pass_bits;
    if (per_pass <= 0.0) {
        Scenario one = s;
        one.mission.passes = 1;
        per_pass = run_downlink_qkd(one, 0, 8).secure_bits_finite;
    }
    c.throughput = constellation_throughput({s.orbit.satellites, s.orbit.altitude_m / 1e3}, s.protocol.stations_served,
                                            s.protocol.passes_per_year, per_pass);
    Table plan{{"quantity", "value"}, {}};
    plan.add({std::string("passes_per_day"), c.statistics.passes_per_day});
    plan.add({std::string("mean_pass_duration_s"), c.statistics.mean_duration_s});
    plan.add({std::string("key_per_pass_bits"), per_pass});
    plan.add({std::string("per_station_bits_per_year"), c.throughput.per_station_bits_per_year});
    plan.add({std::string("aggregate_bits_per_year"), c.throughput.aggregate_bits_per_year});
    r.plots["throughput.csv"] = plan;
    r.pass = Table{{"quantity", "value"}, {}};
    r.pass.add({std::string("total_passes"), static_cast<double>(c.statistics.total_passes)});
    r.pass.add({std::string("days"), static_cast<double>(s.protocol.days)});
    r.budget = budget_table(link_loss(s.link_config(0), slant_range_km(s.orbit.altitude_m / 1e3, 90.0), 90.0));
    r.plots["loss_vs_elevation.csv"] = loss_vs_elevation(s, 0);

    r.note("passes_per_day", c.statistics.passes_per_day);
    r.note("mean_pass_duration_s", c.statistics.mean_duration_s);
    r.note("key_per_pass_bits", per_pass);
    r.note("per_station_bits_per_year", c.throughput.per_station_bits_per_year);
    r.note("aggregate_bits_per_year", c.throughput.aggregate_bits_per_year);
    r.constellation = c;
}

} // namespace detail

inline MissionReport run_scenario(const Scenario& s) {
    s.validate();
    MissionReport r;
    r.name = s.mission.name;
    r.kind = s.mission.kind;
    r.seed = s.seeds.master;
    r.note("mission", s.mission.name);
    r.note("kind", std::string(to_string(s.mission.kind)));
    r.note("seed", std::to_string(s.seeds.master));
    r.note("passes", static_cast<double>(s.mission.passes));
    switch (s.mission.kind) {
    case MissionKind::downlink_qkd: detail::run_qkd(s, r); break;
    case MissionKind::two_downlink_entanglement: detail::run_entanglement(s, r); break;
    case MissionKind::uplink_teleportation: detail::run_teleportation(s, r); break;
    case MissionKind::relay_exchange: detail::run_relay(s, r); break;
    case MissionKind::gravity_test: detail::run_gravity(s, r); break;
    case MissionKind::constellation_plan: detail::run_constellation(s, r); break;
    }
    return r;
}

} // namespace skylink
