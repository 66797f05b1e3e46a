#!/usr/bin/env python3
"""Generates the synthetic demo inputs under recipes/.

The DEMs are small synthetic rasters (paraboloid crater bowls on a flat
plain); footprint coordinates are in the projected CRS of their recipe
(Moon: IAU_2015:30185 Albers equal-area sphere; Mars: 103885 equidistant
cylindrical sphere). Run from the repository root:

    python3 tools/make_demo_data.py
"""

import json
import math
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "recipes")

MOON_R = 1737400.0
MARS_R = 3396190.0


def moon_albers(lat, lon):
    phi, lam = math.radians(lat), math.radians(lon)
    phi0 = math.radians(40.0)
    phi1, phi2 = math.radians(60.0), math.radians(20.0)
    n = (math.sin(phi1) + math.sin(phi2)) / 2.0
    c = math.cos(phi1) ** 2 + 2.0 * n * math.sin(phi1)
    rho = MOON_R * math.sqrt(c - 2.0 * n * math.sin(phi)) / n
    rho0 = MOON_R * math.sqrt(c - 2.0 * n * math.sin(phi0)) / n
    theta = n * lam
    return rho * math.sin(theta), rho0 - rho * math.cos(theta)


def mars_eqc(lat, lon):
    return MARS_R * math.radians(lon), MARS_R * math.radians(lat)


def circle(cx, cy, r, n=36):
    return [
        [round(cx + r * math.cos(2 * math.pi * i / n), 3),
         round(cy + r * math.sin(2 * math.pi * i / n), 3)]
        for i in range(n)
    ]


def close(ring):
    return ring + [ring[0]]


def feature(coords, props):
    return {
        "type": "Feature",
        "properties": props,
        "geometry": {"type": "Polygon", "coordinates": [close(coords)]},
    }


def collection(features):
    return {"type": "FeatureCollection", "features": features}


def write_json(name, obj):
    path = os.path.join(OUT, name)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        json.dump(obj, f, indent=1)
        f.write("\n")
    print("wrote", path)


def write_asc(name, ncols, nrows, xll, yll, cellsize, values, nodata=-9999):
    path = os.path.join(OUT, name)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(f"ncols {ncols}\n")
        f.write(f"nrows {nrows}\n")
        f.write(f"xllcorner {xll:.3f}\n")
        f.write(f"yllcorner {yll:.3f}\n")
        f.write(f"cellsize {cellsize:.3f}\n")
        f.write(f"NODATA_value {nodata}\n")
        for row in values:  # north row first
            f.write(" ".join(f"{v:.1f}" for v in row) + "\n")
    print("wrote", path)


def bowl_dem(name, craters, margin, max_cells=96, nodata_corner=True):
    xs, ys = [], []
    for cx, cy, r, _ in craters:
        xs += [cx - r, cx + r]
        ys += [cy - r, cy + r]
    x0, x1 = min(xs) - margin, max(xs) + margin
    y0, y1 = min(ys) - margin, max(ys) + margin
    span = max(x1 - x0, y1 - y0)
    cellsize = round(span / max_cells, 0)
    ncols = int(math.ceil((x1 - x0) / cellsize))
    nrows = int(math.ceil((y1 - y0) / cellsize))
    rows = []
    for rr in range(nrows):  # north first
        s = nrows - 1 - rr
        y = y0 + (s + 0.5) * cellsize
        row = []
        for c in range(ncols):
            x = x0 + (c + 0.5) * cellsize
            z = 0.0
            for cx, cy, r, depth in craters:
                d2 = ((x - cx) ** 2 + (y - cy) ** 2) / (r * r)
                if d2 < 1.0:
                    z = min(z, -depth * (1.0 - d2))
            row.append(z)
        rows.append(row)
    if nodata_corner:
        rows[0][0] = -9999
        rows[0][1] = -9999
    write_asc(name, ncols, nrows, x0, y0, cellsize, rows)


# -- Moon south pole -------------------------------------------------------

# The Albers cone stretches azimuthal distances heavily this close to the
# pole, so the synthetic scene is laid out as offsets around one projected
# anchor instead of using per-feature geographic placements.
ax, ay = moon_albers(-89.00, 120.0)
ax, ay = round(ax, 0), round(ay, 0)

shackleton = (ax - 42000.0, ay - 28000.0)
shoemaker = (ax + 43000.0, ay + 18000.0)
tooley = (shoemaker[0] + 24000.0, shoemaker[1] + 6000.0)  # overlaps Shoemaker

craters_south = [
    (shackleton[0], shackleton[1], 10500.0, 4200.0),
    (shoemaker[0], shoemaker[1], 25900.0, 3000.0),
    (tooley[0], tooley[1], 7000.0, 1400.0),
]

d = math.dist(shoemaker, tooley)
assert d < 25900.0 + 7000.0, f"Shoemaker/Tooley must overlap, got {d:.0f} m"

write_json(
    "data/moon_south_craters.geojson",
    collection([
        feature(circle(*craters_south[0][:3]), {
            "craterID": 5339, "craterName": "Shackleton", "diameter": 21000.0,
            "depth": 4200.0, "IAUID": 5339, "approvalDate": 1994, "target": "Moon",
        }),
        feature(circle(*craters_south[1][:3]), {
            "craterID": 5499, "craterName": "Shoemaker", "diameter": 51800.0,
            "depth": 3000.0, "IAUID": 5499, "approvalDate": 1970, "target": "Moon",
        }),
        feature(circle(*craters_south[2][:3]), {
            "craterID": 16059, "craterName": "Tooley", "diameter": 14000.0,
            "depth": 1400.0, "IAUID": 16059, "approvalDate": 2021, "target": "Moon",
        }),
    ]),
)
bowl_dem("data/moon_south_dem.asc", craters_south, margin=6000.0)

# mining grid: three adjacent 1 km cells
mx, my = ax + 62000.0, ay - 45000.0
mining = []
for i in range(3):
    x0 = mx + i * 1000.0
    mining.append(feature(
        [[x0, my], [x0 + 1000.0, my], [x0 + 1000.0, my + 1000.0], [x0, my + 1000.0]],
        {"punitObjectType": f"miningCell-{i + 1}"},
    ))
write_json("data/moon_mining.geojson", collection(mining))

# PSR polygons: irregular hexagons a few km across
def blob(cx, cy, r, bumps):
    pts = []
    n = len(bumps)
    for i, k in enumerate(bumps):
        a = 2 * math.pi * i / n
        pts.append([round(cx + r * k * math.cos(a), 3), round(cy + r * k * math.sin(a), 3)])
    return pts

p1 = (ax - 15000.0, ay + 32000.0)
p2 = (ax - 60000.0, ay + 8000.0)
p3 = (ax + 5000.0, ay - 52000.0)
# the evidence type carries no name attribute, so PSR features stay bare
write_json(
    "data/moon_psr.geojson",
    collection([
        feature(blob(p1[0], p1[1], 2400.0, [1.0, 0.7, 1.1, 0.8, 1.0, 0.7]), {}),
        feature(blob(p2[0], p2[1], 1700.0, [0.9, 1.2, 0.8, 1.0, 0.7, 1.1, 0.9]), {}),
        feature(blob(p3[0], p3[1], 3000.0, [1.0, 0.8, 0.9, 1.2, 0.7, 1.0]), {}),
    ]),
)

# building with three prismatic units
bx, by = ax + 21000.0, ay - 9000.0


def rect(x0, y0, w, h):
    return [[x0, y0], [x0 + w, y0], [x0 + w, y0 + h], [x0, y0 + h]]


write_json(
    "data/moon_building.solids.json",
    {
        "building": {
            "id": "building1",
            "attributes": {
                "buildingState": "planned",
                "buildingID": "LSB-0001",
                "buildingObjectID": "ILRS-HAB-1",
            },
        },
        "units": [
            {"id": "0pNy6pOyf7JPmXRLgxs3sW",
             "attributes": {"unitUseType": "scientificExperiment"},
             "footprint": rect(bx, by, 12.0, 8.0), "z_low": 0.0, "z_high": 3.0},
            {"id": "1qGz7rPzg8KQnYSMhyt4tX",
             "attributes": {"unitUseType": "habitation"},
             "footprint": rect(bx + 12.0, by, 10.0, 8.0), "z_low": 0.0, "z_high": 3.0},
            {"id": "2rHa8sQah9LRoZTNizu5uY",
             "attributes": {"unitUseType": "storage"},
             "footprint": rect(bx, by, 22.0, 8.0), "z_low": 3.0, "z_high": 6.0},
        ],
    },
)

# -- Moon nearside ---------------------------------------------------------

# IP cluster: small irregular patches
ip1 = moon_albers(2.02, 43.50)
ip2 = moon_albers(2.05, 43.55)
ip3 = moon_albers(1.98, 43.58)
write_json(
    "data/moon_ips.geojson",
    collection([
        feature(blob(ip1[0], ip1[1], 180.0, [1.0, 0.8, 1.1, 0.7, 0.9, 1.0, 0.8]),
                {"objectName": "Secchi-1", "objectType": "Irregular Patch",
                 "registrationDate": "2025-03-14"}),
        feature(blob(ip2[0], ip2[1], 120.0, [0.9, 1.1, 0.8, 1.0, 0.7, 1.2]),
                {"objectName": "Secchi-2", "objectType": "Irregular Patch",
                 "registrationDate": "2025-03-14"}),
        feature(blob(ip3[0], ip3[1], 240.0, [1.0, 0.7, 1.0, 0.8, 1.1, 0.9, 0.8, 1.0]),
                {"objectName": "Secchi-3", "objectType": "Irregular Patch",
                 "registrationDate": "2025-03-14"}),
    ]),
)

# -- Mars ------------------------------------------------------------------

jez = mars_eqc(18.38, 77.58)
jx, jy = round(jez[0], 0), round(jez[1], 0)
write_json(
    "data/mars_jezero.geojson",
    feature(circle(jx, jy, 23760.0), {
        "craterID": 14300, "craterName": "Jezero", "diameter": 47520.0,
        "IAUID": 14300, "approvalDate": 2007, "target": "Mars",
    }),
)
bowl_dem("data/mars_jezero_dem.asc", [(jx, jy, 23760.0, 2500.0)],
         margin=4000.0, max_cells=64)

hp = mars_eqc(-14.60, 175.50)
hx, hy = round(hp[0], 0), round(hp[1], 0)
write_json(
    "data/mars_homeplate.geojson",
    feature(blob(hx, hy, 45.0, [1.0, 0.9, 1.0, 0.85, 1.0, 0.95, 1.0, 0.9]), {}),
)

# -- recipes ---------------------------------------------------------------

landing_sites = [
    ("Apollo 11 LM", 0.67416, 23.47314),
    ("Apollo 17 LM", 20.19106, 30.77228),
    ("Apollo 12 LM", -3.01279, -23.42192),
    ("Apollo 14 LM", -3.64589, -17.47194),
    ("Apollo 15 LM", 26.13239, 3.63330),
    ("Apollo 16 LM", -8.97344, 15.50105),
    ("Surveyor 1", -2.47448, 316.66020),
    ("Surveyor 3", -3.01623, -23.41801),
    ("Surveyor 5", 1.45515, 23.19426),
    ("Surveyor 6", 0.47424, -1.42752),
    ("Surveyor 7", -40.98117, -11.51270),
    ("Chang'e 3", 44.12142, -19.51174),
    ("Yutu Rover", 44.12085, -19.51219),
]

write_json("moon_south_pole.json", {
    "crs": "IAU_2015:30185",
    "seed": 20250810,
    "base_elevation": 0.0,
    "output": "moon_south_pole.city.json",
    "steps": [
        {"role": "crater", "ref": "craters",
         "source": "data/moon_south_craters.geojson",
         "dem": "data/moon_south_dem.asc"},
        {"role": "plan_unit", "ref": "mining",
         "source": "data/moon_mining.geojson",
         "use": "mining", "underground": 500.0, "aboveground": 0.0},
        {"role": "legal_space", "target": "mining",
         "analysis": {"type": "Extrusion", "down": 500.0}},
        {"role": "scientific_evidence", "ref": "psr",
         "source": "data/moon_psr.geojson", "evidence": "waterIce",
         "analysis": {"type": "Extrusion", "up": 25.0, "down": 25.0}},
        {"role": "restriction", "target": "psr", "restrictionType": "scientific",
         "analysis": {"type": "3DBuffer", "value": 250.0, "unit": "metre"}},
        {"role": "plan_unit", "ref": "settlement",
         "center": {"lat": -88.76, "lon": -232.0}, "side": 4500.0,
         "use": "settlement", "underground": 50.0, "aboveground": 50.0},
        {"role": "restriction", "target": "settlement", "restrictionType": "settlement",
         "analysis": {"type": "3DBuffer", "value": 50.0, "unit": "metre"}},
        {"role": "building", "ref": "building",
         "source": "data/moon_building.solids.json"},
        {"role": "legal_space", "target": "building",
         "analysis": {"type": "3DBuffer", "value": 0.001, "unit": "metre"}},
        {"role": "legal_space", "target": "building/units",
         "analysis": {"type": "3DBuffer", "value": 0.001, "unit": "metre"}},
    ],
})

write_json("moon_nearside.json", {
    "crs": "IAU_2015:30185",
    "seed": 20250811,
    "base_elevation": 0.0,
    "output": "moon_nearside.city.json",
    "steps": [
        {"role": "protected_area", "ref": "sites",
         "buffer": 5.0, "up": 1.0, "down": 1.0,
         "sites": [{"areaName": n.replace("Apollo ", "A").replace("Surveyor ", "S")
                    if n.startswith(("Apollo", "Surveyor")) else n,
                    "lat": lat, "lon": lon}
                   for n, lat, lon in landing_sites]},
        {"role": "restriction", "target": "sites", "restrictionType": "historicalSite",
         "analysis": {"type": "BufferExtrusion", "value": 75.0, "unit": "metre",
                      "up": 25.0, "down": 25.0}},
        {"role": "surface_object", "ref": "ips",
         "source": "data/moon_ips.geojson", "up": 1.0, "down": 1.0},
        {"role": "restriction", "target": "ips", "restrictionType": "scientific",
         "analysis": {"type": "3DBuffer", "value": 10.0, "unit": "metre"}},
    ],
})

write_json("mars.json", {
    "crs": "EPSG:103885",
    "seed": 20250812,
    "base_elevation": 0.0,
    "output": "mars.city.json",
    "steps": [
        {"role": "crater", "ref": "jezero",
         "source": "data/mars_jezero.geojson",
         "dem": "data/mars_jezero_dem.asc"},
        {"role": "scientific_evidence", "ref": "homeplate",
         "source": "data/mars_homeplate.geojson", "evidence": "astrobiological",
         "analysis": {"type": "BufferExtrusion", "value": 1.0, "unit": "metre",
                      "up": 2.5, "down": 2.5}},
        {"role": "restriction", "target": "homeplate", "restrictionType": "scientific",
         "analysis": {"type": "3DBuffer", "value": 250.0, "unit": "metre"}},
    ],
})

print("done")
