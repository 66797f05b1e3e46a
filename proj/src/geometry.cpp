#include "astrocity/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include "astrocity/errors.hpp"

namespace bg = boost::geometry;

namespace astrocity::geom {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, false, true>;  // ccw, closed
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;

BgPolygon to_boost(const Polygon2& p) {
    BgPolygon out;
    for (const auto& v : p.exterior) out.outer().push_back({v.x, v.y});
    out.outer().push_back({p.exterior.front().x, p.exterior.front().y});
    out.inners().resize(p.holes.size());
    for (std::size_t h = 0; h < p.holes.size(); ++h) {
        for (const auto& v : p.holes[h]) out.inners()[h].push_back({v.x, v.y});
        out.inners()[h].push_back({p.holes[h].front().x, p.holes[h].front().y});
    }
    bg::correct(out);
    return out;
}

Ring2 from_boost_ring(const BgPolygon::ring_type& ring) {
    Ring2 out;
    // closed ring: last point repeats the first
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        out.push_back({bg::get<0>(ring[i]), bg::get<1>(ring[i])});
    return out;
}

Polygon2 from_boost(const BgPolygon& p) {
    Polygon2 out;
    out.exterior = from_boost_ring(p.outer());
    for (const auto& inner : p.inners()) out.holes.push_back(from_boost_ring(inner));
    return out;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        return (v > 0.0) - (v < 0.0);
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    // proper crossing only; shared endpoints and collinear touches pass
    return o1 * o2 < 0 && o3 * o4 < 0;
}

bool ring_self_intersects(const Ring2& ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent across the seam
            if (segments_cross(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
                return true;
        }
    }
    return false;
}

bool point_in_ring(const Ring2& ring, const Vec2& pt) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[j];
        if ((a.y > pt.y) != (b.y > pt.y)) {
            const double x_cross = (b.x - a.x) * (pt.y - a.y) / (b.y - a.y) + a.x;
            if (pt.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

bool point_on_ring(const Ring2& ring, const Vec2& pt) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[(i + 1) % n];
        const double cross = (b.x - a.x) * (pt.y - a.y) - (b.y - a.y) * (pt.x - a.x);
        if (cross != 0.0) continue;
        if (pt.x < std::min(a.x, b.x) || pt.x > std::max(a.x, b.x)) continue;
        if (pt.y < std::min(a.y, b.y) || pt.y > std::max(a.y, b.y)) continue;
        return true;
    }
    return false;
}

double ring_length(const Ring2& ring) {
    double len = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[(i + 1) % ring.size()];
        len += std::hypot(b.x - a.x, b.y - a.y);
    }
    return len;
}

}  // namespace

double ring_signed_area(const Ring2& ring) {
    if (ring.empty()) return 0.0;
    // anchored at the first vertex: keeps precision for small rings far
    // from the origin (projected coordinates reach 1e6 m)
    const Vec2 o = ring.front();
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
        const double ax = ring[i].x - o.x, ay = ring[i].y - o.y;
        const double bx = ring[i + 1].x - o.x, by = ring[i + 1].y - o.y;
        acc += ax * by - bx * ay;
    }
    return acc / 2.0;
}

double polygon_area(const Polygon2& p) {
    double area = std::abs(ring_signed_area(p.exterior));
    for (const auto& h : p.holes) area -= std::abs(ring_signed_area(h));
    return area;
}

double perimeter(const Polygon2& p) {
    double len = ring_length(p.exterior);
    for (const auto& h : p.holes) len += ring_length(h);
    return len;
}

bool point_in_polygon(const Polygon2& p, const Vec2& pt) {
    if (point_on_ring(p.exterior, pt)) return true;
    if (!point_in_ring(p.exterior, pt)) return false;
    for (const auto& h : p.holes) {
        if (point_on_ring(h, pt)) return true;
        if (point_in_ring(h, pt)) return false;
    }
    return true;
}

Aabb clip_bbox(const Polygon2& p) {
    Aabb box{p.exterior.front().x, p.exterior.front().y,
             p.exterior.front().x, p.exterior.front().y};
    for (const auto& v : p.exterior) {
        box.min_x = std::min(box.min_x, v.x);
        box.min_y = std::min(box.min_y, v.y);
        box.max_x = std::max(box.max_x, v.x);
        box.max_y = std::max(box.max_y, v.y);
    }
    return box;
}

void require_valid(const Polygon2& p) {
    if (p.exterior.size() < 3)
        throw Error("InvalidPolygon", "exterior ring has fewer than 3 vertices");
    if (ring_signed_area(p.exterior) <= 0.0)
        throw Error("InvalidPolygon", "exterior ring is not counterclockwise");
    if (ring_self_intersects(p.exterior))
        throw Error("InvalidPolygon", "exterior ring self-intersects");
    for (const auto& h : p.holes) {
        if (h.size() < 3)
            throw Error("InvalidPolygon", "hole ring has fewer than 3 vertices");
        if (ring_signed_area(h) >= 0.0)
            throw Error("InvalidPolygon", "hole ring is not clockwise");
        if (ring_self_intersects(h))
            throw Error("InvalidPolygon", "hole ring self-intersects");
        for (const auto& v : h)
            if (!point_in_ring(p.exterior, v) && !point_on_ring(p.exterior, v))
                throw Error("InvalidPolygon", "hole vertex outside the exterior ring");
    }
}

Polygon2 buffer2d(const Polygon2& p, double r, int segments_per_quadrant) {
    require_valid(p);
    if (r < 0.0) throw Error("PreconditionViolated", "negative buffer radius");
    if (segments_per_quadrant < 1)
        throw Error("PreconditionViolated", "segments_per_quadrant must be >= 1");
    if (r == 0.0) return p;

    const std::size_t points_per_circle = 4 * static_cast<std::size_t>(segments_per_quadrant);
    bg::strategy::buffer::distance_symmetric<double> distance(r);
    bg::strategy::buffer::join_round join(points_per_circle);
    bg::strategy::buffer::end_round end(points_per_circle);
    bg::strategy::buffer::point_circle circle(points_per_circle);
    bg::strategy::buffer::side_straight side;

    BgMultiPolygon out;
    bg::buffer(to_boost(p), out, distance, side, join, end, circle);
    if (out.empty()) throw Error("InvalidPolygon", "buffer produced no output");

    // A positive buffer of a connected polygon stays connected; keep the
    // largest component if robustness noise splits off slivers.
    const BgPolygon* best = &out.front();
    double best_area = bg::area(out.front());
    for (const auto& cand : out) {
        const double a = bg::area(cand);
        if (a > best_area) {
            best = &cand;
            best_area = a;
        }
    }
    return from_boost(*best);
}

Polygon2 buffer_point(const Vec2& center, double r, int segments_per_quadrant) {
    if (r <= 0.0) throw Error("DegenerateGeometry", "point buffer requires r > 0");
    if (segments_per_quadrant < 1)
        throw Error("PreconditionViolated", "segments_per_quadrant must be >= 1");
    const int n = 4 * segments_per_quadrant;
    Polygon2 disc;
    disc.exterior.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * i / n;
        disc.exterior.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    return disc;
}

SolidMesh extrude(const Polygon2& p, double z_low, double z_high) {
    require_valid(p);
    if (!(z_high > z_low)) throw Error("DegenerateHeight", "z_high must exceed z_low");

    std::vector<const Ring2*> rings;
    rings.push_back(&p.exterior);
    for (const auto& h : p.holes) rings.push_back(&h);

    std::vector<Face3> faces;

    Face3 top;  // as-stored winding: exterior ccw (up), holes cw
    Face3 bottom;
    for (const Ring2* ring : rings) {
        std::vector<Vec3> up, down;
        up.reserve(ring->size());
        down.reserve(ring->size());
        for (const auto& v : *ring) up.push_back({v.x, v.y, z_high});
        for (auto it = ring->rbegin(); it != ring->rend(); ++it)
            down.push_back({it->x, it->y, z_low});
        top.rings.push_back(std::move(up));
        bottom.rings.push_back(std::move(down));
    }
    faces.push_back(std::move(top));
    faces.push_back(std::move(bottom));

    // one quad wall per directed edge; outward for both ring senses
    for (const Ring2* ring : rings) {
        const std::size_t n = ring->size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = (*ring)[i];
            const Vec2& b = (*ring)[(i + 1) % n];
            Face3 wall;
            wall.rings.push_back({{a.x, a.y, z_low},
                                  {b.x, b.y, z_low},
                                  {b.x, b.y, z_high},
                                  {a.x, a.y, z_high}});
            faces.push_back(std::move(wall));
        }
    }

    SolidMesh mesh;
    mesh.shells.push_back(std::move(faces));
    return mesh;
}

SolidMesh buffer3d(const Polygon2& p, double z_low, double z_high, double r,
                   int segments_per_quadrant) {
    if (r < 0.0) throw Error("PreconditionViolated", "negative buffer radius");
    if (!(z_high > z_low)) throw Error("DegenerateHeight", "z_high must exceed z_low");
    if (r == 0.0) return extrude(p, z_low, z_high);
    return extrude(buffer2d(p, r, segments_per_quadrant), z_low - r, z_high + r);
}

namespace {

double fan_determinant_sum(const std::vector<Vec3>& ring) {
    double acc = 0.0;
    const Vec3& o = ring.front();
    for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
        const Vec3& a = ring[i];
        const Vec3& b = ring[i + 1];
        acc += o.x * (a.y * b.z - a.z * b.y) - o.y * (a.x * b.z - a.z * b.x) +
               o.z * (a.x * b.y - a.y * b.x);
    }
    return acc;
}

}  // namespace

double solid_volume(const SolidMesh& s) {
    // divergence theorem over per-ring fans; exact for planar faces
    double acc = 0.0;
    if (s.shells.empty()) return 0.0;
    for (const auto& face : s.shells.front())
        for (const auto& ring : face.rings)
            if (ring.size() >= 3) acc += fan_determinant_sum(ring);
    return acc / 6.0;
}

std::vector<Issue> check_watertight(const SolidMesh& s) {
    std::map<std::tuple<double, double, double>, std::size_t> index;
    std::vector<Vec3> vertices;
    IndexedShells shells;
    for (const auto& shell : s.shells) {
        auto& out_shell = shells.emplace_back();
        for (const auto& face : shell) {
            auto& out_face = out_shell.emplace_back();
            for (const auto& ring : face.rings) {
                auto& out_ring = out_face.emplace_back();
                for (const auto& v : ring) {
                    auto [it, inserted] =
                        index.try_emplace({v.x, v.y, v.z}, vertices.size());
                    if (inserted) vertices.push_back(v);
                    out_ring.push_back(it->second);
                }
            }
        }
    }
    return check_watertight_indexed(vertices, shells);
}

std::vector<Issue> check_watertight_indexed(const std::vector<Vec3>& vertices,
                                            const IndexedShells& shells,
                                            double planarity_tol) {
    std::vector<Issue> issues;
    auto add = [&issues](const std::string& code, const std::string& path,
                         const std::string& message) {
        issues.push_back({code, Severity::Error, "", path, message});
    };

    for (std::size_t si = 0; si < shells.size(); ++si) {
        const auto& shell = shells[si];
        const std::string shell_path = "shell/" + std::to_string(si);

        // forward/backward counts per undirected edge
        std::map<std::pair<std::size_t, std::size_t>, std::pair<int, int>> edges;
        for (std::size_t fi = 0; fi < shell.size(); ++fi) {
            const std::string face_path = shell_path + "/surface/" + std::to_string(fi);
            for (const auto& ring : shell[fi]) {
                if (ring.size() < 3) {
                    add("DEGENERATE_RING", face_path, "ring with fewer than 3 vertices");
                    continue;
                }
                for (std::size_t i = 0; i < ring.size(); ++i) {
                    const std::size_t a = ring[i];
                    const std::size_t b = ring[(i + 1) % ring.size()];
                    if (a == b) {
                        add("DEGENERATE_RING", face_path, "zero-length edge");
                        continue;
                    }
                    auto& slot = edges[{std::min(a, b), std::max(a, b)}];
                    (a < b ? slot.first : slot.second) += 1;
                }
            }
        }
        for (const auto& [edge, counts] : edges) {
            const int total = counts.first + counts.second;
            const std::string edge_name =
                std::to_string(edge.first) + "-" + std::to_string(edge.second);
            if (total != 2) {
                add("UNMATCHED_EDGE", shell_path,
                    "edge " + edge_name + " used by " + std::to_string(total) +
                        " surfaces, expected 2");
            } else if (counts.first != 1) {
                add("ORIENTATION", shell_path,
                    "edge " + edge_name + " traversed twice in the same direction");
            }
        }

        // planarity against the Newell best-fit plane
        for (std::size_t fi = 0; fi < shell.size(); ++fi) {
            Vec3 n{0, 0, 0};
            Vec3 centroid{0, 0, 0};
            std::size_t count = 0;
            for (const auto& ring : shell[fi]) {
                for (std::size_t i = 0; i < ring.size(); ++i) {
                    const Vec3& a = vertices[ring[i]];
                    const Vec3& b = vertices[ring[(i + 1) % ring.size()]];
                    n.x += (a.y - b.y) * (a.z + b.z);
                    n.y += (a.z - b.z) * (a.x + b.x);
                    n.z += (a.x - b.x) * (a.y + b.y);
                    centroid.x += a.x;
                    centroid.y += a.y;
                    centroid.z += a.z;
                    ++count;
                }
            }
            const double len = std::sqrt(n.x * n.x + n.y * n.y + n.z * n.z);
            if (count == 0 || len == 0.0) continue;
            centroid = {centroid.x / count, centroid.y / count, centroid.z / count};
            double max_dev = 0.0;
            for (const auto& ring : shell[fi]) {
                for (const std::size_t vi : ring) {
                    const Vec3& v = vertices[vi];
                    const double d = ((v.x - centroid.x) * n.x + (v.y - centroid.y) * n.y +
                                      (v.z - centroid.z) * n.z) /
                                     len;
                    max_dev = std::max(max_dev, std::abs(d));
                }
            }
            if (max_dev > planarity_tol)
                add("NONPLANAR", shell_path + "/surface/" + std::to_string(fi),
                    "vertex deviates " + std::to_string(max_dev) +
                        " m from the best-fit plane");
        }
    }

    // outer-shell volume sign (only meaningful on a closed, consistently
    // oriented shell)
    if (!shells.empty() &&
        std::none_of(issues.begin(), issues.end(), [](const Issue& i) {
            return i.code == "UNMATCHED_EDGE" || i.code == "DEGENERATE_RING" ||
                   i.code == "ORIENTATION";
        })) {
        double acc = 0.0;
        for (const auto& face : shells.front()) {
            for (const auto& ring : face) {
                if (ring.size() < 3) continue;
                const Vec3& o = vertices[ring[0]];
                for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
                    const Vec3& a = vertices[ring[i]];
                    const Vec3& b = vertices[ring[i + 1]];
                    acc += o.x * (a.y * b.z - a.z * b.y) - o.y * (a.x * b.z - a.z * b.x) +
                           o.z * (a.x * b.y - a.y * b.x);
                }
            }
        }
        if (acc / 6.0 <= 0.0)
            add("NONPOSITIVE_VOLUME", "shell/0",
                "outer shell volume " + std::to_string(acc / 6.0) + " m^3");
    }

    return issues;
}

}  // namespace astrocity::geom
