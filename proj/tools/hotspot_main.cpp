// hotspot: spatial hotspot analysis of point events over polygonal zones.
//
// Subcommand-per-stage layout with file handoffs, so the permutation-heavy
// stages can be rerun alone when alpha or the seed changes. Exit codes:
// 0 success, 2 configuration, 3 data, 4 degeneracy.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hotspot/hotspot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hotspot;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    write_text_file(path.string(), content);
}

// ---- shared pipeline pieces ----

struct WeightsParams {
    int k = 10;
    bool binary = false;       // keep binary weights (skip row standardization)
    bool symmetric = false;    // union with the transpose before standardizing
};

SpatialWeights build_zone_weights(const ZoneSet& zones, const Projection& proj,
                                  const WeightsParams& params, int workers) {
    auto centroids = zone_centroids(zones, proj);
    auto w = knn_weights(centroids, params.k, workers);
    if (params.symmetric) w = symmetrize(w);
    if (!params.binary) w = row_standardize(w);
    return w;
}

json weights_meta_json(const SpatialWeights& w, const WeightsParams& params) {
    json j;
    j["method"] = w.meta.method;
    j["k"] = w.meta.k;
    j["standardized"] = w.meta.standardized;
    j["symmetrized"] = params.symmetric;
    j["representative_point"] = "area-weighted planar centroid";
    return j;
}

struct LisaParams {
    WeightsParams weights;
    int permutations = 999;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    std::string alternative = "greater";
    bool fdr = false;
    int workers = 1;
};

struct LisaOutput {
    MoranGlobalResult global;
    LisaResult lisa;
    std::vector<double> adjusted_p;  // fdr-adjusted when requested
};

LisaOutput run_lisa_stage(std::span<const double> values, const SpatialWeights& w,
                          const LisaParams& params) {
    Tail tail = tail_from_name(params.alternative);
    LisaOutput out;
    out.global = permutation_test_global(values, w, params.permutations, params.seed, tail,
                                         params.workers);
    auto local = local_moran(values, w);
    auto p = conditional_permutation_local(values, w, params.permutations, params.seed, tail,
                                           params.workers);
    out.adjusted_p = params.fdr ? fdr_adjust(p) : p;
    out.lisa = classify_lisa(values, w, local, out.adjusted_p, params.alpha);
    return out;
}

json lisa_feature_properties(const ZoneSet& zones, const LisaOutput& out, std::size_t z) {
    json props;
    props["zone_id"] = zones.ids[z];
    props["value"] = out.lisa.value[z];
    props["z"] = out.lisa.z[z];
    props["lag"] = out.lisa.lag[z];
    props["local_I"] = out.lisa.local_i[z];
    props["pseudo_p"] = out.lisa.pseudo_p[z];
    props["quadrant"] = quadrant_name(out.lisa.quadrant[z]);
    props["label"] = label_name(out.lisa.label[z]);
    return props;
}

void write_lisa_geojson(const fs::path& path, const ZoneSet& zones, const LisaOutput& out) {
    json doc;
    doc["type"] = "FeatureCollection";
    json features = json::array();
    for (std::size_t z = 0; z < zones.zone_count(); ++z) {
        json feature;
        feature["type"] = "Feature";
        feature["properties"] = lisa_feature_properties(zones, out, z);
        feature["geometry"] = zone_geometry_json(zones, z);
        features.push_back(std::move(feature));
    }
    doc["features"] = std::move(features);
    write_file(path, doc.dump(2) + "\n");
}

void write_lisa_csv(const fs::path& path, const ZoneSet& zones, const LisaOutput& out) {
    std::ostringstream os;
    CsvWriter w(os);
    w.row({"zone_id", "value", "z", "lag", "local_I", "pseudo_p", "quadrant", "label"});
    for (std::size_t z = 0; z < zones.zone_count(); ++z) {
        w.row({zones.ids[z], format_double(out.lisa.value[z]), format_double(out.lisa.z[z]),
               format_double(out.lisa.lag[z]), format_double(out.lisa.local_i[z]),
               format_double(out.lisa.pseudo_p[z]), quadrant_name(out.lisa.quadrant[z]),
               label_name(out.lisa.label[z])});
    }
    write_file(path, os.str());
}

json lisa_report_json(const LisaOutput& out, const SpatialWeights& w, const LisaParams& params,
                      const std::string& subcommand) {
    json report = base_report(subcommand);
    json global;
    global["I"] = out.global.I;
    global["expected_I"] = out.global.expected_I;
    global["pseudo_p"] = out.global.pseudo_p;
    global["permutations"] = out.global.permutations;
    global["seed"] = out.global.seed;
    global["alternative"] = tail_name(out.global.tail);
    global["count_ge"] = out.global.count_ge;
    global["count_le"] = out.global.count_le;
    report["global"] = global;
    report["weights"] = weights_meta_json(w, params.weights);
    report["alpha"] = params.alpha;
    report["fdr"] = params.fdr;
    report["local_scheme"] = "conditional (hold-one-out) permutation";
    // rank-based p-values cannot resolve below this floor
    report["pseudo_p_resolution"] = 1.0 / (params.permutations + 1.0);
    json label_counts;
    for (int l = 0; l <= static_cast<int>(LisaLabel::NotSignificant); ++l) {
        label_counts[label_name(static_cast<LisaLabel>(l))] = 0;
    }
    for (auto l : out.lisa.label) {
        auto key = label_name(l);
        label_counts[key] = label_counts[key].get<int>() + 1;
    }
    report["label_counts"] = label_counts;
    return report;
}

std::vector<double> counts_as_values(const std::vector<ZoneCounts>& counts) {
    std::vector<double> v;
    v.reserve(counts.size());
    for (const auto& c : counts) v.push_back(static_cast<double>(c.total));
    return v;
}

// ---- subcommand options ----

struct IngestOpts {
    std::string crashes_path;
    std::string mapping_path;
    std::string out_dir;
    std::string window_start = "2015-01-01T00:00:00";
    std::string window_end = "2024-12-31T23:59:59";
    std::vector<double> bbox;  // lon_min lat_min lon_max lat_max
};

ColumnMapping load_mapping(const std::string& mapping_path) {
    if (mapping_path.empty()) return parse_column_mapping(default_mapping_json());
    if (mapping_path == "normalized") {
        // identity mapping over this tool's own normalized schema
        json m;
        m["report_id"] = "report_id";
        m["timestamp"] = {{"column", "timestamp"}, {"format", "iso8601"}};
        m["lon"] = "lon";
        m["lat"] = "lat";
        m["severity"] = {{"column", "severe"}, {"true_values", {"1"}}};
        json flags;
        for (const char* name : kFlagNames) {
            flags[name] = {{"column", name}, {"true_values", {"1"}}};
        }
        m["flags"] = flags;
        return parse_column_mapping(m.dump());
    }
    return parse_column_mapping(read_text_file(mapping_path));
}

DateWindow parse_window(const std::string& start, const std::string& end) {
    auto s = parse_iso8601(start);
    auto e = parse_iso8601(end);
    if (!s || !e || !(*s <= *e)) {
        throw config_error("invalid study window: " + start + " .. " + end);
    }
    return {*s, *e};
}

int run_ingest(const IngestOpts& opts) {
    ColumnMapping mapping = load_mapping(opts.mapping_path);
    IngestOptions io;
    io.window = parse_window(opts.window_start, opts.window_end);
    if (!opts.bbox.empty()) {
        io.bounds = {opts.bbox[0], opts.bbox[2], opts.bbox[1], opts.bbox[3]};
        if (io.bounds.lon_min >= io.bounds.lon_max || io.bounds.lat_min >= io.bounds.lat_max) {
            throw config_error("invalid bounding box");
        }
    }
    std::ifstream in(opts.crashes_path, std::ios::binary);
    if (!in) throw config_error("cannot open crash csv: " + opts.crashes_path);
    auto result = load_crashes(in, mapping, io);

    fs::create_directories(opts.out_dir);
    std::ostringstream normalized;
    write_normalized_csv(normalized, result.records);
    write_file(fs::path(opts.out_dir) / "crashes_normalized.csv", normalized.str());
    std::ostringstream quarantine;
    write_quarantine_csv(quarantine, result.quarantine);
    write_file(fs::path(opts.out_dir) / "quarantine.csv", quarantine.str());

    json report = base_report("ingest");
    report["inputs"] = {{"crashes", hash_file(opts.crashes_path)}};
    report["raw_rows"] = result.raw_rows;
    report["normalized"] = result.records.size();
    report["quarantined"] = result.quarantine.size();
    report["conserved"] = result.records.size() + result.quarantine.size() == result.raw_rows;
    json reasons = json::object();
    for (const auto& q : result.quarantine) {
        reasons[q.reason] = reasons.value(q.reason, 0) + 1;
    }
    report["quarantine_reasons"] = reasons;
    report["window"] = {{"start", opts.window_start}, {"end", opts.window_end}};
    report["bbox"] = {{"lon_min", io.bounds.lon_min},
                      {"lon_max", io.bounds.lon_max},
                      {"lat_min", io.bounds.lat_min},
                      {"lat_max", io.bounds.lat_max}};
    write_file(fs::path(opts.out_dir) / "ingest_report.json", report.dump(2) + "\n");

    std::cout << "ingest: " << result.records.size() << " records, " << result.quarantine.size()
              << " quarantined of " << result.raw_rows << " rows\n";
    return 0;
}

struct AnalysisInputs {
    std::string crashes_path;
    std::string zones_path;
    std::string id_key = "GEOID";
    std::string out_dir;
    std::string filter = "all";
};

struct LoadedAnalysis {
    ZoneSet zones;
    std::vector<CrashRecord> records;  // after filtering
    ZoneAssignment assignment;
    std::vector<ZoneCounts> counts;
    std::size_t records_total = 0;
    std::size_t unassigned = 0;
};

LoadedAnalysis load_analysis(const AnalysisInputs& in, int workers) {
    LoadedAnalysis out;
    out.zones = read_zones_geojson(in.zones_path, in.id_key);
    std::ifstream stream(in.crashes_path, std::ios::binary);
    if (!stream) throw config_error("cannot open normalized csv: " + in.crashes_path);
    auto records = read_normalized_csv(stream);
    out.records_total = records.size();
    out.records = filter_crashes(records, RecordFilter::parse(in.filter));
    std::vector<GeoPoint> pts;
    pts.reserve(out.records.size());
    for (const auto& r : out.records) pts.push_back(r.location);
    out.assignment = assign_zones(pts, out.zones, workers);
    for (auto a : out.assignment) {
        if (a == kUnassigned) ++out.unassigned;
    }
    out.counts = aggregate_by_zone(out.records, out.assignment, out.zones);
    return out;
}

json analysis_inputs_json(const AnalysisInputs& in) {
    return json{{"crashes", hash_file(in.crashes_path)}, {"zones", hash_file(in.zones_path)}};
}

int run_lisa(const AnalysisInputs& inputs, const LisaParams& params) {
    auto loaded = load_analysis(inputs, params.workers);
    Projection proj(zones_reference(loaded.zones));
    auto w = build_zone_weights(loaded.zones, proj, params.weights, params.workers);
    auto values = counts_as_values(loaded.counts);
    auto out = run_lisa_stage(values, w, params);

    fs::create_directories(inputs.out_dir);
    write_lisa_geojson(fs::path(inputs.out_dir) / "lisa.geojson", loaded.zones, out);
    write_lisa_csv(fs::path(inputs.out_dir) / "lisa.csv", loaded.zones, out);
    json report = lisa_report_json(out, w, params, "lisa");
    report["value"] = "count of records matching filter '" + inputs.filter + "'";
    report["filter"] = inputs.filter;
    report["n_zones"] = loaded.zones.zone_count();
    report["n_records"] = loaded.records.size();
    report["n_records_total"] = loaded.records_total;
    report["n_unassigned"] = loaded.unassigned;
    report["projection_reference"] = {{"lon", proj.reference().lon}, {"lat", proj.reference().lat}};
    report["inputs"] = analysis_inputs_json(inputs);
    write_file(fs::path(inputs.out_dir) / "lisa_report.json", report.dump(2) + "\n");

    std::cout << "lisa: I=" << out.global.I << " pseudo_p=" << out.global.pseudo_p << " ("
              << out.global.permutations << " permutations, seed " << out.global.seed << ")\n";
    return 0;
}

// Per-zone severity counts from a (zone_id, severe, total) CSV, ordered and
// completed against the zone set; zones absent from the file count as zero.
std::vector<SeverityInput> read_severity_csv(const std::string& path, const ZoneSet& zones) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open severity csv: " + path);
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 3 || fields[0] != "zone_id") {
        throw data_error("severity csv: expected header zone_id,severe,total");
    }
    std::map<std::string, SeverityInput> by_id;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 3) throw data_error("severity csv: malformed row");
        auto severe = parse_int(fields[1]);
        auto total = parse_int(fields[2]);
        if (!severe || !total) throw data_error("severity csv: bad counts for '" + fields[0] + "'");
        if (!by_id.emplace(fields[0], SeverityInput{*severe, *total}).second) {
            throw data_error("severity csv: duplicate zone id '" + fields[0] + "'");
        }
    }
    std::vector<SeverityInput> out(zones.zone_count());
    std::size_t matched = 0;
    for (std::size_t z = 0; z < zones.zone_count(); ++z) {
        auto it = by_id.find(zones.ids[z]);
        if (it != by_id.end()) {
            out[z] = it->second;
            ++matched;
        }
    }
    if (matched != by_id.size()) {
        throw data_error("severity csv: " + std::to_string(by_id.size() - matched) +
                         " zone id(s) not present in the zone file");
    }
    return out;
}

int run_ebi_lisa(const AnalysisInputs& inputs, const LisaParams& params,
                 const std::string& severity_csv) {
    if (inputs.filter != "all") {
        throw config_error("ebi-lisa always uses severe/total counts; --filter is not supported");
    }
    ZoneSet zones;
    std::vector<SeverityInput> severity;
    json input_hashes;
    std::size_t n_records = 0, unassigned = 0;
    if (!severity_csv.empty()) {
        zones = read_zones_geojson(inputs.zones_path, inputs.id_key);
        severity = read_severity_csv(severity_csv, zones);
        input_hashes = {{"severity", hash_file(severity_csv)},
                        {"zones", hash_file(inputs.zones_path)}};
    } else {
        auto loaded = load_analysis(inputs, params.workers);
        zones = std::move(loaded.zones);
        severity.reserve(loaded.counts.size());
        for (const auto& c : loaded.counts) severity.push_back({c.severe, c.total});
        input_hashes = analysis_inputs_json(inputs);
        n_records = loaded.records.size();
        unassigned = loaded.unassigned;
    }
    auto ebi = ebi_transform(severity);

    Projection proj(zones_reference(zones));
    auto w = build_zone_weights(zones, proj, params.weights, params.workers);
    auto out = run_lisa_stage(ebi.ebi_standardized, w, params);

    fs::create_directories(inputs.out_dir);
    // EBI table
    {
        std::ostringstream os;
        CsvWriter writer(os);
        writer.row({"zone_id", "rate", "std", "ebi", "ebi_standardized"});
        for (std::size_t z = 0; z < zones.zone_count(); ++z) {
            writer.row({zones.ids[z], format_double(ebi.severity_rate[z]),
                        format_double(ebi.severity_rate_std[z]), format_double(ebi.ebi[z]),
                        format_double(ebi.ebi_standardized[z])});
        }
        write_file(fs::path(inputs.out_dir) / "ebi.csv", os.str());
    }
    write_lisa_geojson(fs::path(inputs.out_dir) / "ebi_lisa.geojson", zones, out);
    write_lisa_csv(fs::path(inputs.out_dir) / "ebi_lisa.csv", zones, out);

    json report = lisa_report_json(out, w, params, "ebi-lisa");
    report["value"] = "standardized EBI of the severity rate";
    json ebi_meta;
    ebi_meta["global_severity_rate"] = ebi.global_severity_rate;
    ebi_meta["ebi_mean"] = ebi.ebi_mean;
    ebi_meta["ebi_stdev"] = ebi.ebi_stdev;
    ebi_meta["stdev_convention"] = "population (divide by n)";
    // the global rate smooths the pooled sums once, not per zone
    ebi_meta["global_rate_form"] = "(sum severe + 1) / (sum total + 2), pooled smoothing";
    report["ebi"] = ebi_meta;
    report["n_zones"] = zones.zone_count();
    report["n_records"] = n_records;
    report["n_unassigned"] = unassigned;
    report["severity_source"] = severity_csv.empty() ? "aggregated from crash records"
                                                     : "severity csv";
    report["projection_reference"] = {{"lon", proj.reference().lon}, {"lat", proj.reference().lat}};
    report["inputs"] = input_hashes;
    write_file(fs::path(inputs.out_dir) / "ebi_lisa_report.json", report.dump(2) + "\n");

    std::cout << "ebi-lisa: I=" << out.global.I << " pseudo_p=" << out.global.pseudo_p
              << " global_rate=" << ebi.global_severity_rate << "\n";
    return 0;
}

struct KdeOpts {
    std::string crashes_path;
    std::string out_dir;
    std::string filter = "all";
    double bandwidth = 0.0;  // 0 -> Silverman
    double cell = 100.0;
    std::vector<double> grid_origin;  // x y (projected meters)
    int grid_cols = 0;
    int grid_rows = 0;
    std::vector<double> reference;  // lon lat
    bool pgm = false;
    int workers = 1;
};

int run_kde(const KdeOpts& opts) {
    std::ifstream stream(opts.crashes_path, std::ios::binary);
    if (!stream) throw config_error("cannot open normalized csv: " + opts.crashes_path);
    auto records = filter_crashes(read_normalized_csv(stream), RecordFilter::parse(opts.filter));
    if (records.empty()) throw data_error("kde: no records after filtering");

    std::vector<GeoPoint> geo;
    geo.reserve(records.size());
    for (const auto& r : records) geo.push_back(r.location);
    GeoPoint ref;
    if (opts.reference.size() == 2) {
        ref = {opts.reference[0], opts.reference[1]};
    } else {
        double lon_min = geo[0].lon, lon_max = geo[0].lon;
        double lat_min = geo[0].lat, lat_max = geo[0].lat;
        for (const auto& g : geo) {
            lon_min = std::min(lon_min, g.lon);
            lon_max = std::max(lon_max, g.lon);
            lat_min = std::min(lat_min, g.lat);
            lat_max = std::max(lat_max, g.lat);
        }
        ref = {0.5 * (lon_min + lon_max), 0.5 * (lat_min + lat_max)};
    }
    auto pts = project(geo, ref);

    double h = opts.bandwidth > 0.0 ? opts.bandwidth : silverman_bandwidth(pts);
    GridSpec spec;
    bool explicit_grid = opts.grid_origin.size() == 2 && opts.grid_cols > 0 && opts.grid_rows > 0;
    if (explicit_grid) {
        spec = {{opts.grid_origin[0], opts.grid_origin[1]}, opts.cell, opts.grid_cols,
                opts.grid_rows};
        validate_grid(spec);
    } else {
        spec = auto_grid(pts, h, opts.cell);
    }
    auto grid = kde_grid(pts, h, spec, opts.workers);

    fs::create_directories(opts.out_dir);
    {
        std::ostringstream os;
        write_esri_ascii(os, grid);
        write_file(fs::path(opts.out_dir) / "kde.asc", os.str());
    }
    if (opts.pgm) {
        std::ostringstream os;
        write_pgm(os, grid);
        write_file(fs::path(opts.out_dir) / "kde.pgm", os.str());
    }

    json report = base_report("kde");
    report["inputs"] = {{"crashes", hash_file(opts.crashes_path)}};
    report["filter"] = opts.filter;
    report["n_points"] = pts.size();
    report["kernel"] = grid.kernel;
    report["bandwidth_m"] = h;
    report["bandwidth_source"] = opts.bandwidth > 0.0 ? "explicit" : "silverman";
    report["cutoff_bandwidths"] = kKdeCutoffBandwidths;
    report["grid"] = {{"origin_x", spec.origin.x},
                      {"origin_y", spec.origin.y},
                      {"cell_size_m", spec.cell_size},
                      {"n_cols", spec.n_cols},
                      {"n_rows", spec.n_rows},
                      {"mode", explicit_grid ? "explicit" : "auto"}};
    report["projection_reference"] = {{"lon", ref.lon}, {"lat", ref.lat}};
    report["units"] = "density per square meter in the local projection plane";
    report["mass"] = grid.mass();
    write_file(fs::path(opts.out_dir) / "kde_report.json", report.dump(2) + "\n");

    std::cout << "kde: " << spec.n_cols << "x" << spec.n_rows << " grid, h=" << h
              << " m, mass=" << grid.mass() << "\n";
    return 0;
}

struct TemporalOpts {
    std::string crashes_path;
    std::string out_dir;
    std::string filter = "all";
    std::string window_start = "2015-01-01T00:00:00";
    std::string window_end = "2024-12-31T23:59:59";
};

int run_temporal(const TemporalOpts& opts) {
    std::ifstream stream(opts.crashes_path, std::ios::binary);
    if (!stream) throw config_error("cannot open normalized csv: " + opts.crashes_path);
    auto records = filter_crashes(read_normalized_csv(stream), RecordFilter::parse(opts.filter));
    DateWindow window = parse_window(opts.window_start, opts.window_end);
    auto series = monthly_series(records, window);
    auto matrix = seasonal_matrix(series);

    fs::create_directories(opts.out_dir);
    {
        std::ostringstream os;
        write_series_csv(os, series);
        write_file(fs::path(opts.out_dir) / "monthly.csv", os.str());
    }
    {
        std::ostringstream os;
        write_seasonal_csv(os, matrix);
        write_file(fs::path(opts.out_dir) / "seasonal.csv", os.str());
    }
    json report = base_report("temporal");
    report["inputs"] = {{"crashes", hash_file(opts.crashes_path)}};
    report["filter"] = opts.filter;
    report["n_records"] = records.size();
    report["window"] = {{"start", opts.window_start}, {"end", opts.window_end}};
    write_file(fs::path(opts.out_dir) / "temporal_report.json", report.dump(2) + "\n");
    std::cout << "temporal: " << series.counts.size() << " months\n";
    return 0;
}

struct SynthOpts {
    std::string out_dir;
    int grid_dim = 10;
    double side = 1000.0;
    double base = 50.0;
    double multiplier = 1.0;
    std::vector<int> block;  // r0 c0 r1 c1
    double severe_prob = 0.02;
    double severe_prob_hotspot = -1.0;  // default: same as base
    std::uint64_t seed = 0;
};

int run_synth(const SynthOpts& opts) {
    SynthSpec spec;
    spec.grid_dim = opts.grid_dim;
    spec.zone_side_m = opts.side;
    spec.base_intensity = opts.base;
    spec.hotspot_multiplier = opts.multiplier;
    spec.severe_prob_base = opts.severe_prob;
    spec.severe_prob_hotspot =
        opts.severe_prob_hotspot >= 0.0 ? opts.severe_prob_hotspot : opts.severe_prob;
    spec.seed = opts.seed;
    if (!opts.block.empty()) {
        if (opts.block.size() != 4) throw config_error("synth: --hotspot-block needs r0,c0,r1,c1");
        spec.hotspot_zones =
            lattice_block(spec.grid_dim, opts.block[0], opts.block[1], opts.block[2], opts.block[3]);
    }
    auto out = generate(spec);

    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / "zones.geojson", zones_to_geojson(out.zones).dump(2) + "\n");
    {
        std::ostringstream os;
        write_normalized_csv(os, out.records);
        write_file(fs::path(opts.out_dir) / "crashes.csv", os.str());
    }
    json truth = base_report("synth");
    truth["spec"] = {{"grid_dim", spec.grid_dim},
                     {"zone_side_m", spec.zone_side_m},
                     {"base_intensity", spec.base_intensity},
                     {"hotspot_multiplier", spec.hotspot_multiplier},
                     {"severe_prob_base", spec.severe_prob_base},
                     {"severe_prob_hotspot", spec.severe_prob_hotspot},
                     {"seed", spec.seed}};
    json hot_ids = json::array();
    for (std::size_t z = 0; z < out.hotspot_label.size(); ++z) {
        if (out.hotspot_label[z]) hot_ids.push_back(out.zones.ids[z]);
    }
    truth["hotspot_zone_ids"] = hot_ids;
    json counts = json::array();
    for (auto c : out.zone_counts) counts.push_back(c);
    truth["zone_counts"] = counts;
    write_file(fs::path(opts.out_dir) / "truth.json", truth.dump(2) + "\n");

    std::cout << "synth: " << out.records.size() << " records over "
              << out.zones.zone_count() << " zones\n";
    return 0;
}

struct WeightsExportOpts {
    std::string zones_path;
    std::string id_key = "GEOID";
    std::string out_dir;
    WeightsParams weights;
    int workers = 1;
};

int run_weights_export(const WeightsExportOpts& opts) {
    auto zones = read_zones_geojson(opts.zones_path, opts.id_key);
    Projection proj(zones_reference(zones));
    auto w = build_zone_weights(zones, proj, opts.weights, opts.workers);
    fs::create_directories(opts.out_dir);
    {
        std::ostringstream os;
        write_weights_csv(os, w, zones.ids);
        write_file(fs::path(opts.out_dir) / "weights.csv", os.str());
    }
    write_file(fs::path(opts.out_dir) / "weights.csv.meta.json", weights_sidecar_json(w));
    json report = base_report("weights-export");
    report["inputs"] = {{"zones", hash_file(opts.zones_path)}};
    report["weights"] = weights_meta_json(w, opts.weights);
    report["n_zones"] = zones.zone_count();
    report["projection_reference"] = {{"lon", proj.reference().lon},
                                      {"lat", proj.reference().lat}};
    write_file(fs::path(opts.out_dir) / "weights_report.json", report.dump(2) + "\n");
    std::cout << "weights-export: " << zones.zone_count() << " zones, k=" << opts.weights.k << "\n";
    return 0;
}

void add_weights_options(CLI::App* cmd, WeightsParams& params) {
    cmd->add_option("--k", params.k, "neighbors per zone for the KNN graph")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--binary-weights", params.binary,
                  "keep binary 0/1 weights (skip row standardization)");
    cmd->add_flag("--symmetrize", params.symmetric, "union the KNN graph with its transpose");
}

void add_lisa_options(CLI::App* cmd, LisaParams& params) {
    add_weights_options(cmd, params.weights);
    cmd->add_option("--permutations", params.permutations, "permutation replicates")
        ->check(CLI::Range(99, 1000000))
        ->capture_default_str();
    cmd->add_option("--seed", params.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--alpha", params.alpha, "significance level")
        ->check(CLI::Range(1e-9, 1.0))
        ->capture_default_str();
    cmd->add_option("--alternative", params.alternative,
                    "pseudo-p tail: greater, less, or directional")
        ->check(CLI::IsMember({"greater", "less", "directional"}))
        ->capture_default_str();
    cmd->add_flag("--fdr", params.fdr, "gate labels on Benjamini-Hochberg adjusted p-values");
    cmd->add_option("--workers", params.workers, "worker threads (env HOTSPOT_WORKERS)")
        ->envname("HOTSPOT_WORKERS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatial hotspot analysis of point events over polygonal zones"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read defaults from an INI/TOML config file");

    IngestOpts ingest_opts;
    auto* ingest_cmd = app.add_subcommand("ingest", "normalize a raw collision CSV");
    ingest_cmd->add_option("--crashes", ingest_opts.crashes_path, "raw collision CSV")
        ->required()
        ->check(CLI::ExistingFile);
    ingest_cmd->add_option("--mapping", ingest_opts.mapping_path,
                           "column mapping JSON ('normalized' for this tool's own schema; "
                           "default: Montgomery County ACRS export)");
    ingest_cmd->add_option("--out", ingest_opts.out_dir, "output directory")->required();
    ingest_cmd->add_option("--window-start", ingest_opts.window_start, "study window start (ISO)")
        ->capture_default_str();
    ingest_cmd->add_option("--window-end", ingest_opts.window_end, "study window end (ISO)")
        ->capture_default_str();
    ingest_cmd
        ->add_option("--bbox", ingest_opts.bbox,
                     "lon_min lat_min lon_max lat_max accepted-coordinate box")
        ->expected(4);

    AnalysisInputs lisa_inputs;
    LisaParams lisa_params;
    auto* lisa_cmd = app.add_subcommand("lisa", "global and local Moran analysis of zone counts");
    lisa_cmd->add_option("--crashes", lisa_inputs.crashes_path, "normalized crash CSV")
        ->required()
        ->check(CLI::ExistingFile);
    lisa_cmd->add_option("--zones", lisa_inputs.zones_path, "zone GeoJSON")
        ->required()
        ->check(CLI::ExistingFile);
    lisa_cmd->add_option("--id-key", lisa_inputs.id_key, "zone id property key")
        ->capture_default_str();
    lisa_cmd->add_option("--out", lisa_inputs.out_dir, "output directory")->required();
    lisa_cmd->add_option("--filter", lisa_inputs.filter, "record filter: all, severe, or a flag")
        ->capture_default_str();
    add_lisa_options(lisa_cmd, lisa_params);

    AnalysisInputs ebi_inputs;
    LisaParams ebi_params;
    std::string ebi_severity_csv;
    auto* ebi_cmd = app.add_subcommand("ebi-lisa", "LISA on the standardized EBI severity rate");
    auto* ebi_crashes_opt =
        ebi_cmd->add_option("--crashes", ebi_inputs.crashes_path, "normalized crash CSV")
            ->check(CLI::ExistingFile);
    ebi_cmd->add_option("--severity-csv", ebi_severity_csv,
                        "per-zone (zone_id,severe,total) CSV, replacing --crashes aggregation")
        ->check(CLI::ExistingFile)
        ->excludes(ebi_crashes_opt);
    ebi_cmd->add_option("--zones", ebi_inputs.zones_path, "zone GeoJSON")
        ->required()
        ->check(CLI::ExistingFile);
    ebi_cmd->add_option("--id-key", ebi_inputs.id_key, "zone id property key")
        ->capture_default_str();
    ebi_cmd->add_option("--out", ebi_inputs.out_dir, "output directory")->required();
    add_lisa_options(ebi_cmd, ebi_params);

    KdeOpts kde_opts;
    auto* kde_cmd = app.add_subcommand("kde", "kernel density raster of event locations");
    kde_cmd->add_option("--crashes", kde_opts.crashes_path, "normalized crash CSV")
        ->required()
        ->check(CLI::ExistingFile);
    kde_cmd->add_option("--out", kde_opts.out_dir, "output directory")->required();
    kde_cmd->add_option("--filter", kde_opts.filter, "record filter: all, severe, or a flag")
        ->capture_default_str();
    kde_cmd->add_option("--bandwidth", kde_opts.bandwidth,
                        "kernel bandwidth in meters (default: Silverman's rule)");
    kde_cmd->add_option("--cell", kde_opts.cell, "cell size in meters")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    kde_cmd->add_option("--grid-origin", kde_opts.grid_origin,
                        "explicit grid lower-left corner (projected meters: x y)")
        ->expected(2);
    kde_cmd->add_option("--grid-cols", kde_opts.grid_cols, "explicit grid columns");
    kde_cmd->add_option("--grid-rows", kde_opts.grid_rows, "explicit grid rows");
    kde_cmd->add_option("--ref", kde_opts.reference, "projection reference (lon lat)")->expected(2);
    kde_cmd->add_flag("--pgm", kde_opts.pgm, "also write a min-max normalized PGM render");
    kde_cmd->add_option("--workers", kde_opts.workers, "worker threads (env HOTSPOT_WORKERS)")
        ->envname("HOTSPOT_WORKERS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    TemporalOpts temporal_opts;
    auto* temporal_cmd = app.add_subcommand("temporal", "monthly series and seasonality pivot");
    temporal_cmd->add_option("--crashes", temporal_opts.crashes_path, "normalized crash CSV")
        ->required()
        ->check(CLI::ExistingFile);
    temporal_cmd->add_option("--out", temporal_opts.out_dir, "output directory")->required();
    temporal_cmd->add_option("--filter", temporal_opts.filter, "record filter")
        ->capture_default_str();
    temporal_cmd->add_option("--window-start", temporal_opts.window_start, "window start (ISO)")
        ->capture_default_str();
    temporal_cmd->add_option("--window-end", temporal_opts.window_end, "window end (ISO)")
        ->capture_default_str();

    SynthOpts synth_opts;
    auto* synth_cmd = app.add_subcommand("synth", "synthetic lattice fixture with planted hotspots");
    synth_cmd->add_option("--out", synth_opts.out_dir, "output directory")->required();
    synth_cmd->add_option("--grid-dim", synth_opts.grid_dim, "lattice dimension g (g x g zones)")
        ->capture_default_str();
    synth_cmd->add_option("--side", synth_opts.side, "zone side in meters")->capture_default_str();
    synth_cmd->add_option("--base", synth_opts.base, "expected events per background zone")
        ->capture_default_str();
    synth_cmd->add_option("--multiplier", synth_opts.multiplier, "hotspot intensity multiplier")
        ->capture_default_str();
    synth_cmd->add_option("--hotspot-block", synth_opts.block,
                          "planted block as lattice rows/cols: r0 c0 r1 c1 (inclusive)")
        ->expected(4);
    synth_cmd->add_option("--severe-prob", synth_opts.severe_prob, "severity probability")
        ->capture_default_str();
    synth_cmd->add_option("--severe-prob-hotspot", synth_opts.severe_prob_hotspot,
                          "severity probability inside hotspots (default: same as --severe-prob)");
    synth_cmd->add_option("--seed", synth_opts.seed, "RNG seed")->capture_default_str();

    WeightsExportOpts weights_opts;
    auto* weights_cmd = app.add_subcommand("weights-export", "audit dump of the spatial weights");
    weights_cmd->add_option("--zones", weights_opts.zones_path, "zone GeoJSON")
        ->required()
        ->check(CLI::ExistingFile);
    weights_cmd->add_option("--id-key", weights_opts.id_key, "zone id property key")
        ->capture_default_str();
    weights_cmd->add_option("--out", weights_opts.out_dir, "output directory")->required();
    add_weights_options(weights_cmd, weights_opts.weights);
    weights_cmd->add_option("--workers", weights_opts.workers, "worker threads")
        ->envname("HOTSPOT_WORKERS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(ingest_cmd)) return run_ingest(ingest_opts);
        if (app.got_subcommand(lisa_cmd)) return run_lisa(lisa_inputs, lisa_params);
        if (app.got_subcommand(ebi_cmd)) {
            if (ebi_inputs.crashes_path.empty() && ebi_severity_csv.empty()) {
                throw config_error("ebi-lisa needs --crashes or --severity-csv");
            }
            return run_ebi_lisa(ebi_inputs, ebi_params, ebi_severity_csv);
        }
        if (app.got_subcommand(kde_cmd)) return run_kde(kde_opts);
        if (app.got_subcommand(temporal_cmd)) return run_temporal(temporal_opts);
        if (app.got_subcommand(synth_cmd)) return run_synth(synth_opts);
        if (app.got_subcommand(weights_cmd)) return run_weights_export(weights_opts);
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const degeneracy_error& e) {
        std::cerr << "degeneracy error: " << e.what() << "\n";
        return 4;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
