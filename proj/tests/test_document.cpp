#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "astrocity/document.hpp"
#include "astrocity/errors.hpp"
#include "astrocity/extension.hpp"

using namespace astrocity;
using nlohmann::json;

namespace {

cj::WorldGeometry one_triangle(double z) {
    geom::Face3 face;
    face.rings.push_back({{0.0, 0.0, z}, {10.0, 0.0, z}, {0.0, 10.0, z}});
    cj::WorldGeometry g;
    g.kind = cj::GeometryKind::MultiSurface;
    g.shells.push_back({face});
    return g;
}

const ext::ExtensionRegistry& reg() {
    static const ext::ExtensionRegistry r = ext::builtin_registry();
    return r;
}

}  // namespace

TEST_CASE("new_document starts empty") {
    const auto doc = cj::new_document("https://www.opengis.net/def/crs/EPSG/0/103885");
    CHECK(doc.version == "2.0");
    CHECK(doc.objects.empty());
    CHECK(doc.vertices.empty());
    CHECK(doc.reference_system_url.ends_with("/103885"));
    CHECK_THROWS_AS(cj::new_document(""), Error);
}

TEST_CASE("vertex pool deduplicates quantized coordinates") {
    auto doc = cj::new_document("https://www.opengis.net/def/crs/EPSG/0/103885");
    cj::CityObjectRecord a;
    a.id = "a";
    a.object_type = "+SpaceLegal";
    a.attributes["legalObjectID"] = "a";
    cj::add_object(doc, a, {one_triangle(1.0)}, &reg());
    const std::size_t before = doc.vertices.size();
    CHECK(before == 3);

    cj::CityObjectRecord b;
    b.id = "b";
    b.object_type = "+SpaceLegal";
    b.attributes["legalObjectID"] = "b";
    // shares two vertices with 'a', adds one new
    geom::Face3 face;
    face.rings.push_back({{0.0, 0.0, 1.0}, {10.0, 0.0, 1.0}, {10.0, 10.0, 1.0}});
    cj::WorldGeometry g;
    g.kind = cj::GeometryKind::MultiSurface;
    g.shells.push_back({face});
    cj::add_object(doc, b, {g}, &reg());
    CHECK(doc.vertices.size() == before + 1);
}

TEST_CASE("quantization error stays within half a scale step") {
    cj::Transform t;
    t.scale = {0.001, 0.001, 0.001};
    t.translate = {100.0, -50.0, 3.0};
    auto doc = cj::new_document("https://www.opengis.net/def/crs/IAU_2015/0/30185", t);
    cj::CityObjectRecord a;
    a.id = "a";
    a.object_type = "+SpaceLegal";
    geom::Face3 face;
    const geom::Vec3 v0{123.4567891, -45.9876543, 7.7777777};
    const geom::Vec3 v1{124.0001, -46.0001, 7.0001};
    const geom::Vec3 v2{125.5551, -44.4449, 8.5555};
    face.rings.push_back({v0, v1, v2});
    cj::WorldGeometry g;
    g.kind = cj::GeometryKind::MultiSurface;
    g.shells.push_back({face});
    cj::add_object(doc, a, {g}, &reg());

    const auto& ring = doc.objects.at("a").geometry.front().shells[0][0][0];
    const geom::Vec3 sources[] = {v0, v1, v2};
    for (int i = 0; i < 3; ++i) {
        const geom::Vec3 w = doc.vertex_world(ring[i]);
        CHECK(std::abs(w.x - sources[i].x) <= 0.0005 + 1e-12);
        CHECK(std::abs(w.y - sources[i].y) <= 0.0005 + 1e-12);
        CHECK(std::abs(w.z - sources[i].z) <= 0.0005 + 1e-12);
    }
}

TEST_CASE("add_object wires parent/child links symmetrically") {
    auto doc = cj::new_document("https://www.opengis.net/def/crs/IAU_2015/0/30185");
    cj::CityObjectRecord b;
    b.id = "building1";
    b.object_type = "+SpaceBuilding";
    cj::add_object(doc, b, {}, &reg());

    cj::CityObjectRecord u;
    u.id = "unit1";
    u.object_type = "+SpaceBuildingUnit";
    u.parents = {"building1"};
    cj::add_object(doc, u, {}, &reg());

    const auto& kids = doc.objects.at("building1").children;
    CHECK(std::find(kids.begin(), kids.end(), "unit1") != kids.end());
    CHECK(doc.objects.at("unit1").parents == std::vector<std::string>{"building1"});
}

TEST_CASE("add_object error paths") {
    auto doc = cj::new_document("https://www.opengis.net/def/crs/IAU_2015/0/30185");
    cj::CityObjectRecord bad;
    bad.id = "x";
    bad.object_type = "+Nope";
    CHECK_THROWS_AS(cj::add_object(doc, bad, {}, &reg()), Error);

    cj::CityObjectRecord nan_geom;
    nan_geom.id = "y";
    nan_geom.object_type = "+SpaceLegal";
    geom::Face3 face;
    face.rings.push_back({{0, 0, 0}, {1, 0, std::nan("")}, {0, 1, 0}});
    cj::WorldGeometry g;
    g.kind = cj::GeometryKind::MultiSurface;
    g.shells.push_back({face});
    CHECK_THROWS_AS(cj::add_object(doc, nan_geom, {g}, &reg()), Error);

    cj::CityObjectRecord orphan;
    orphan.id = "z";
    orphan.object_type = "+SpaceBuildingUnit";
    orphan.parents = {"ghost"};
    CHECK_THROWS_AS(cj::add_object(doc, orphan, {}, &reg()), Error);

    // core types pass without a registry
    cj::CityObjectRecord core;
    core.id = "relief";
    core.object_type = "TINRelief";
    CHECK_NOTHROW(cj::add_object(doc, core, {}, nullptr));
}

TEST_CASE("write then read is the identity") {
    auto doc = cj::new_document("https://www.opengis.net/def/crs/EPSG/0/103885");
    cj::declare_extension(doc, reg());

    cj::CityObjectRecord crater;
    crater.id = "14300";
    crater.object_type = "+SpaceCrater";
    crater.attributes = {{"craterID", 14300},
                         {"craterName", "Jezero"},
                         {"diameter", 47520.0},
                         {"approvalDate", 2007},
                         {"target", "Mars"}};
    cj::add_object(doc, crater, {one_triangle(-2500.0)}, &reg());

    const std::string text = cj::write_document(doc);
    const cj::CityDocument back = cj::read_document(text);
    CHECK(back == doc);

    // attribute values survive verbatim
    const auto& attrs = back.objects.at("14300").attributes;
    CHECK(attrs.at("craterID") == 14300);
    CHECK(attrs.at("diameter") == 47520.0);
    CHECK(attrs.at("target") == "Mars");
    CHECK(attrs.at("approvalDate") == 2007);
    CHECK(text.find("47520.0") != std::string::npos);

    // empty document round-trips too
    const auto empty = cj::new_document("https://www.opengis.net/def/crs/EPSG/0/103885");
    CHECK(cj::read_document(cj::write_document(empty)) == empty);
}

TEST_CASE("read rejects corrupt documents with locations") {
    CHECK_THROWS_AS(cj::read_document("{"), ParseError);
    CHECK_THROWS_AS(cj::read_document(R"({"type": "GeoJSON"})"), ParseError);

    // vertex index out of range names the object
    const char* bad = R"({
      "type": "CityJSON", "version": "2.0",
      "transform": {"scale": [1,1,1], "translate": [0,0,0]},
      "CityObjects": {"obj1": {"type": "+SpaceLegal", "geometry": [
        {"type": "MultiSurface", "lod": "1", "boundaries": [[[0, 1, 99]]]}]}},
      "vertices": [[0,0,0],[1,0,0],[0,1,0]]
    })";
    CHECK_THROWS_WITH_AS(cj::read_document(bad), doctest::Contains("obj1"), ParseError);
}

TEST_CASE("rebase moves the translate to the minimum corner") {
    auto doc = cj::new_document("https://www.opengis.net/def/crs/EPSG/0/103885");
    cj::CityObjectRecord a;
    a.id = "a";
    a.object_type = "+SpaceLegal";
    geom::Face3 face;
    face.rings.push_back({{-5.0, 100.0, 2.0}, {-4.0, 100.0, 2.0}, {-5.0, 101.0, 3.0}});
    cj::WorldGeometry g;
    g.kind = cj::GeometryKind::MultiSurface;
    g.shells.push_back({face});
    cj::add_object(doc, a, {g}, &reg());

    const geom::Vec3 before = doc.vertex_world(0);
    cj::rebase_to_min_corner(doc);
    const geom::Vec3 after = doc.vertex_world(0);
    CHECK(before.x == doctest::Approx(after.x).epsilon(1e-12));
    CHECK(before.y == doctest::Approx(after.y).epsilon(1e-12));
    CHECK(before.z == doctest::Approx(after.z).epsilon(1e-12));

    std::array<long long, 3> lo{1, 1, 1};
    for (const auto& v : doc.vertices)
        for (int k = 0; k < 3; ++k) lo[k] = std::min(lo[k], v[k]);
    CHECK(lo == std::array<long long, 3>{0, 0, 0});
    CHECK(doc.transform.translate[0] == doctest::Approx(-5.0));
    CHECK(doc.transform.translate[1] == doctest::Approx(100.0));
    CHECK(doc.transform.translate[2] == doctest::Approx(2.0));
}

TEST_CASE("upgrade rewrites the reference system and keeps content") {
    const char* legacy = R"({
      "type": "CityJSON", "version": "1.0",
      "metadata": {"referenceSystem": "urn:ogc:def:crs:ESRI::103885"},
      "CityObjects": {"a": {"type": "+SpaceLegal", "attributes": {"legalObjectID": "a"},
        "geometry": [{"type": "MultiSurface", "lod": "1", "boundaries": [[[0,1,2]]]}]}},
      "transform": {"scale": [0.001, 0.001, 0.001], "translate": [0, 0, 0]},
      "vertices": [[0,0,0],[1000,0,0],[0,1000,0]]
    })";
    const cj::CityDocument old = cj::read_document(legacy);
    CHECK(old.version == "1.0");

    const cj::CityDocument upgraded = cj::upgrade_document(old);
    CHECK(upgraded.version == "2.0");
    CHECK(upgraded.reference_system_url == "https://www.opengis.net/def/crs/EPSG/0/103885");
    CHECK(upgraded.objects == old.objects);
    CHECK(upgraded.vertices == old.vertices);
    CHECK(upgraded.transform == old.transform);

    CHECK_THROWS_AS(cj::upgrade_document(upgraded), Error);
    try {
        cj::upgrade_document(upgraded);
    } catch (const Error& e) {
        CHECK(e.code() == "AlreadyCurrent");
    }
}

TEST_CASE("parent/child symmetry holds after any add_object sequence") {
    // randomized: each object picks 0-2 parents among those already added
    std::uint64_t s = 0xfeedULL;
    auto rnd = [&s](std::uint64_t n) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s % n;
    };

    auto doc = cj::new_document("https://www.opengis.net/def/crs/IAU_2015/0/30185");
    std::vector<std::string> ids;
    for (int i = 0; i < 60; ++i) {
        cj::CityObjectRecord rec;
        rec.id = "o" + std::to_string(i);
        rec.object_type = i % 2 ? "+SpaceBuilding" : "+SpaceBuildingUnit";
        if (!ids.empty())
            for (std::uint64_t k = rnd(3); k > 0; --k)
                rec.parents.push_back(ids[rnd(ids.size())]);
        std::sort(rec.parents.begin(), rec.parents.end());
        rec.parents.erase(std::unique(rec.parents.begin(), rec.parents.end()),
                          rec.parents.end());
        cj::add_object(doc, rec, {}, &reg());
        ids.push_back(rec.id);
    }

    for (const auto& [id, obj] : doc.objects) {
        for (const auto& pid : obj.parents) {
            const auto& kids = doc.objects.at(pid).children;
            CHECK(std::find(kids.begin(), kids.end(), id) != kids.end());
        }
        for (const auto& cid : obj.children) {
            const auto& parents = doc.objects.at(cid).parents;
            CHECK(std::find(parents.begin(), parents.end(), id) != parents.end());
        }
    }
}

TEST_CASE("the vertex pool never holds duplicate triplets") {
    std::uint64_t s = 0xbeefULL;
    auto rnd = [&s]() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s % 10) / 1000.0;  // 10 values per axis: forces collisions
    };

    auto doc = cj::new_document("https://www.opengis.net/def/crs/IAU_2015/0/30185");
    for (int i = 0; i < 40; ++i) {
        cj::CityObjectRecord rec;
        rec.id = "t" + std::to_string(i);
        rec.object_type = "+SpaceLegal";
        geom::Face3 face;
        face.rings.push_back({{rnd(), rnd(), rnd()}, {rnd(), rnd(), rnd()}, {rnd(), rnd(), rnd()}});
        cj::WorldGeometry g;
        g.kind = cj::GeometryKind::MultiSurface;
        g.shells.push_back({face});
        cj::add_object(doc, rec, {g}, &reg());
    }
    std::set<std::array<long long, 3>> seen;
    for (const auto& v : doc.vertices) CHECK(seen.insert(v).second);
    CHECK(doc.vertices.size() < 40 * 3);  // collisions actually happened
}

TEST_CASE("read_document survives corrupted input without crashing") {
    const std::string good = cj::write_document([] {
        auto doc = cj::new_document("https://www.opengis.net/def/crs/EPSG/0/103885");
        cj::CityObjectRecord rec;
        rec.id = "a";
        rec.object_type = "+SpaceLegal";
        geom::Face3 face;
        face.rings.push_back({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
        cj::WorldGeometry g;
        g.kind = cj::GeometryKind::MultiSurface;
        g.shells.push_back({face});
        cj::add_object(doc, rec, {g}, &reg());
        return doc;
    }());

    // truncations
    for (std::size_t cut = 0; cut < good.size(); cut += 37) {
        try {
            cj::read_document(good.substr(0, cut));
        } catch (const ParseError&) {
        }
    }
    // type flips at json-structural characters
    for (const char c : {'[', '{', '"', ':'}) {
        std::string bad = good;
        const auto pos = bad.rfind(c);
        if (pos != std::string::npos) bad[pos] = 'x';
        try {
            cj::read_document(bad);
        } catch (const ParseError&) {
        }
    }
}

TEST_CASE("urn to url rewrites verified against manual derivations") {
    CHECK(cj::reference_system_urn_to_url("urn:ogc:def:crs:ESRI::103885") ==
          "https://www.opengis.net/def/crs/EPSG/0/103885");
    CHECK(cj::reference_system_urn_to_url("urn:ogc:def:crs:EPSG::4326") ==
          "https://www.opengis.net/def/crs/EPSG/0/4326");
    CHECK(cj::reference_system_urn_to_url("urn:ogc:def:crs:IAU_2015::30185") ==
          "https://www.opengis.net/def/crs/IAU_2015/0/30185");
    CHECK_THROWS_AS(cj::reference_system_urn_to_url("urn:nope"), Error);
}
