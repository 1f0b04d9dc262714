#!/usr/bin/env python3
"""Regenerate the expected JSON dumps of the HepMC fixtures.

Parsing is delegated to pyhepmc (HepMC3's HepMC2 reader). HepMC3 renumbers
particles and vertices and does not keep file order, so the original barcodes
are recovered by pairing each particle with the P line carrying the same
(pdg, status, momentum), and each vertex with the V line carrying the same
position and outgoing particles. Pairings must be unique.
Values are converted to GeV and mm the same way the C++ reader does it.

usage: make_golden.py FIXTURE.hepmc [...]   writes FIXTURE.json next to each
"""
import json
import sys

import pyhepmc


def raw_records(path):
    """Per event: V and P records as written, for pairing barcodes."""
    events = []
    with open(path) as f:
        for line in f:
            t = line.split()
            if not t:
                continue
            if t[0] == "E":
                events.append({"V": [], "P": []})
                pending = None
            elif t[0] == "V":
                v = {"barcode": int(t[1]), "pos": tuple(float(x) for x in t[3:7]), "out": []}
                events[-1]["V"].append(v)
                pending = (v, int(t[7]), int(t[8]))
            elif t[0] == "P":
                p = {"barcode": int(t[1]), "key": (int(t[2]), int(t[8])) + tuple(float(x) for x in t[3:7])}
                events[-1]["P"].append(p)
                v, n_orphan, n_out = pending
                if n_orphan > 0:
                    pending = (v, n_orphan - 1, n_out)
                else:
                    v["out"].append(p["barcode"])
                    pending = (v, 0, n_out - 1)
    return events


def unique(mapping, key):
    hits = mapping[key]
    assert len(hits) == 1, f"ambiguous record {key}"
    return hits[0]


def dump(path):
    out = []
    raw = raw_records(path)
    with pyhepmc.open(path) as f:
        for ev, rec in zip(f, raw):
            p_scale = 1e-3 if ev.momentum_unit == pyhepmc.Units.MEV else 1.0
            x_scale = 10.0 if ev.length_unit == pyhepmc.Units.CM else 1.0
            by_key = {}
            for r in rec["P"]:
                by_key.setdefault(r["key"], []).append(r["barcode"])
            pmap = {}
            for p in ev.particles:
                m = p.momentum
                pmap[p.id] = unique(by_key, (p.pid, p.status, m.px, m.py, m.pz, m.e))
            by_vkey = {}
            for r in rec["V"]:
                by_vkey.setdefault((r["pos"], tuple(sorted(r["out"]))), []).append(r["barcode"])
            vmap = {}
            for v in ev.vertices:
                pos = v.position
                key = ((pos.x, pos.y, pos.z, pos.t), tuple(sorted(pmap[p.id] for p in v.particles_out)))
                vmap[v.id] = unique(by_vkey, key)
            assert len(pmap) == len(rec["P"]) and len(vmap) == len(rec["V"])
            a = ev.attributes

            def vid(v):
                return vmap[v.id] if v is not None and v.id != 0 else 0

            vertices = []
            for v in ev.vertices:
                pos = v.position
                vertices.append({
                    "barcode": vmap[v.id],
                    "id": v.status,
                    "position": [pos.x * x_scale, pos.y * x_scale, pos.z * x_scale, pos.t * x_scale],
                    "particles_in": sorted(pmap[p.id] for p in v.particles_in),
                    "particles_out": sorted(pmap[p.id] for p in v.particles_out),
                })
            particles = []
            for p in ev.particles:
                m = p.momentum
                particles.append({
                    "barcode": pmap[p.id],
                    "pdg_id": p.pid,
                    "momentum": [m.px * p_scale, m.py * p_scale, m.pz * p_scale, m.e * p_scale],
                    "generated_mass": p.generated_mass * p_scale,
                    "status": p.status,
                    "production_vertex": vid(p.production_vertex),
                    "end_vertex": vid(p.end_vertex),
                })
            vertices.sort(key=lambda v: -v["barcode"])
            particles.sort(key=lambda p: p["barcode"])
            out.append({
                "event_number": ev.event_number,
                "n_mpi": int(a["mpi"]),
                "event_scale": float(a["event_scale"]),
                "alpha_qcd": float(a["alphaQCD"]),
                "alpha_qed": float(a["alphaQED"]),
                "signal_process_id": int(a["signal_process_id"]),
                "signal_vertex": vmap.get(int(a["signal_process_vertex"]), 0),
                "weights": list(ev.weights),
                "momentum_unit": "GEV",
                "length_unit": "MM",
                "vertices": vertices,
                "particles": particles,
            })
    return out


if __name__ == "__main__":
    for path in sys.argv[1:]:
        target = path.rsplit(".hepmc", 1)[0] + ".json"
        with open(target, "w") as f:
            json.dump(dump(path), f, indent=1)
            f.write("\n")
        print(target)
