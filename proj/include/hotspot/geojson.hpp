#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hotspot/csv.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/zones.hpp"

namespace hotspot {

namespace detail {

inline std::vector<GeoPoint> geojson_ring(const nlohmann::json& arr, const std::string& where) {
    if (!arr.is_array()) throw data_error("geojson: ring is not an array in " + where);
    std::vector<GeoPoint> ring;
    ring.reserve(arr.size());
    for (const auto& pos : arr) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
            throw data_error("geojson: bad coordinate in " + where);
        }
        GeoPoint p{pos[0].get<double>(), pos[1].get<double>()};
        if (!geo_in_range(p)) throw data_error("geojson: coordinate out of range in " + where);
        ring.push_back(p);
    }
    return ring;
}

inline ZonePolygon geojson_polygon(const nlohmann::json& rings, const std::string& zone_id) {
    if (!rings.is_array() || rings.empty()) {
        throw data_error("geojson: polygon without rings for zone '" + zone_id + "'");
    }
    ZonePolygon poly;
    poly.zone_id = zone_id;
    poly.outer = geojson_ring(rings[0], "zone '" + zone_id + "'");
    for (std::size_t i = 1; i < rings.size(); ++i) {
        poly.holes.push_back(geojson_ring(rings[i], "zone '" + zone_id + "'"));
    }
    normalize_polygon(poly);
    return poly;
}

}  // namespace detail

// Parses a GeoJSON FeatureCollection of Polygon / MultiPolygon features.
// The zone id comes from the named property key ("GEOID" by default) and is
// treated as an opaque string.
inline ZoneSet parse_zones_geojson(const std::string& text, const std::string& id_key = "GEOID") {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw data_error("geojson: parse failure");
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array()) {
        throw data_error("geojson: expected a FeatureCollection with a features array");
    }
    ZoneSet zones;
    for (const auto& feature : doc["features"]) {
        if (!feature.is_object() || !feature.contains("geometry")) {
            throw data_error("geojson: feature without geometry");
        }
        const auto& props = feature.value("properties", nlohmann::json::object());
        if (!props.contains(id_key)) {
            throw data_error("geojson: feature missing id property '" + id_key + "'");
        }
        std::string zone_id = props[id_key].is_string()
                                  ? props[id_key].get<std::string>()
                                  : props[id_key].dump();
        const auto& geom = feature["geometry"];
        std::string type = geom.value("type", "");
        if (type == "Polygon") {
            zones.parts.push_back(detail::geojson_polygon(geom["coordinates"], zone_id));
        } else if (type == "MultiPolygon") {
            for (const auto& rings : geom["coordinates"]) {
                zones.parts.push_back(detail::geojson_polygon(rings, zone_id));
            }
        } else {
            throw data_error("geojson: unsupported geometry type '" + type + "' for zone '" +
                             zone_id + "'");
        }
    }
    if (zones.parts.empty()) throw data_error("geojson: no zones found");
    zones.rebuild_index();
    return zones;
}

inline ZoneSet read_zones_geojson(const std::string& path, const std::string& id_key = "GEOID") {
    return parse_zones_geojson(read_text_file(path), id_key);
}

namespace detail {

inline nlohmann::json ring_to_json(const std::vector<GeoPoint>& ring) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : ring) arr.push_back(nlohmann::json::array({p.lon, p.lat}));
    return arr;
}

}  // namespace detail

// FeatureCollection for a ZoneSet, one feature per part, id under `id_key`.
inline nlohmann::json zones_to_geojson(const ZoneSet& zones, const std::string& id_key = "GEOID") {
    nlohmann::json doc;
    doc["type"] = "FeatureCollection";
    nlohmann::json features = nlohmann::json::array();
    for (const auto& part : zones.parts) {
        nlohmann::json feature;
        feature["type"] = "Feature";
        feature["properties"] = {{id_key, part.zone_id}};
        nlohmann::json rings = nlohmann::json::array();
        rings.push_back(detail::ring_to_json(part.outer));
        for (const auto& h : part.holes) rings.push_back(detail::ring_to_json(h));
        feature["geometry"] = {{"type", "Polygon"}, {"coordinates", rings}};
        features.push_back(std::move(feature));
    }
    doc["features"] = std::move(features);
    return doc;
}

// Serializes one zone's geometry back out: Polygon for single-part zones,
// MultiPolygon otherwise.
inline nlohmann::json zone_geometry_json(const ZoneSet& zones, std::size_t zone) {
    std::vector<const ZonePolygon*> parts;
    for (std::size_t p = 0; p < zones.parts.size(); ++p) {
        if (zones.part_zone[p] == static_cast<std::int32_t>(zone)) parts.push_back(&zones.parts[p]);
    }
    auto part_rings = [](const ZonePolygon& poly) {
        nlohmann::json rings = nlohmann::json::array();
        rings.push_back(detail::ring_to_json(poly.outer));
        for (const auto& h : poly.holes) rings.push_back(detail::ring_to_json(h));
        return rings;
    };
    nlohmann::json geom;
    if (parts.size() == 1) {
        geom["type"] = "Polygon";
        geom["coordinates"] = part_rings(*parts[0]);
    } else {
        geom["type"] = "MultiPolygon";
        nlohmann::json coords = nlohmann::json::array();
        for (const auto* p : parts) coords.push_back(part_rings(*p));
        geom["coordinates"] = coords;
    }
    return geom;
}

}  // namespace hotspot
