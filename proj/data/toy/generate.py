#!/usr/bin/env python3
"""Regenerates the bundled toy dataset: two small rooms seen from a few posed
frames, their reconstructions, and hand-made generative samples.

Images use the expanded domain 72 x (28 + 72 + 28). Run from anywhere; files
are written next to this script.
"""
import json
import math
import struct
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent
H, W, M = 72, 72, 28
WF = W + 2 * M
FX = FY = W / 2.0
CX, CY = WF / 2.0, H / 2.0


def rot_y(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def world_to_camera(yaw, position):
    r_wc = rot_y(yaw)
    r = r_wc.T
    t = -r @ np.asarray(position, float)
    return r, t


def camera_json(r, t):
    return {"fx": FX, "fy": FY, "cx": CX, "cy": CY, "width": WF, "height": H,
            "R": [float(v) for v in r.reshape(-1)], "t": [float(v) for v in t]}


def box_corners(center, extent):
    c, e = np.asarray(center, float), np.asarray(extent, float) / 2
    return np.array([c + e * np.array([sx, sy, sz]) for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])


def bbox_of(r, t, center, extent):
    pc = box_corners(center, extent) @ r.T + t
    if np.any(pc[:, 2] <= 0.05):
        return None
    u = FX * pc[:, 0] / pc[:, 2] + CX
    v = FY * pc[:, 1] / pc[:, 2] + CY
    x0, x1 = max(0.0, u.min()), min(float(WF), u.max())
    y0, y1 = max(0.0, v.min()), min(float(H), v.max())
    if x1 - x0 < 1 or y1 - y0 < 1:
        return None
    return [round(x0, 3), round(y0, 3), round(x1, 3), round(y1, 3)]


def box_surface(center, extent, step):
    c, e = np.asarray(center, float), np.asarray(extent, float)
    pts = []
    for axis in range(3):
        a, b = [k for k in range(3) if k != axis]
        na = max(2, int(round(e[a] / step)) + 1)
        nb = max(2, int(round(e[b] / step)) + 1)
        for side in (-0.5, 0.5):
            for i in np.linspace(-0.5, 0.5, na):
                for j in np.linspace(-0.5, 0.5, nb):
                    p = np.zeros(3)
                    p[axis], p[a], p[b] = side, i, j
                    pts.append(c + p * e)
    return np.unique(np.round(np.array(pts), 6), axis=0)


def room_surface(half, floor_y, ceil_y, step):
    xs = np.arange(-half, half + 1e-9, step)
    ys = np.arange(ceil_y, floor_y + 1e-9, step)
    pts = [(x, floor_y, z) for x in xs for z in xs]
    for w in (-half, half):
        pts += [(w, y, z) for y in ys for z in xs]
        pts += [(x, y, w) for y in ys for x in xs]
    return np.unique(np.round(np.array(pts), 6), axis=0)


def ray_depth(r, t, boxes, half, floor_y, ceil_y):
    """Camera-frame z of the first surface hit per pixel centre."""
    r_cw, c = r.T, -r.T @ t
    depth = np.zeros((H, WF))
    lo_room = np.array([-half, ceil_y, -half])
    hi_room = np.array([half, floor_y, half])
    for row in range(H):
        for col in range(WF):
            d_cam = np.array([(col + 0.5 - CX) / FX, (row + 0.5 - CY) / FY, 1.0])
            d = r_cw @ d_cam
            best = math.inf
            for center, extent in boxes:
                lo = np.asarray(center) - np.asarray(extent) / 2
                hi = np.asarray(center) + np.asarray(extent) / 2
                with np.errstate(divide="ignore", invalid="ignore"):
                    t0, t1 = (lo - c) / d, (hi - c) / d
                tn = np.nanmax(np.minimum(t0, t1))
                tf = np.nanmin(np.maximum(t0, t1))
                if tn <= tf and tn > 0:
                    best = min(best, tn)
            with np.errstate(divide="ignore", invalid="ignore"):
                ts = np.maximum((lo_room - c) / d, (hi_room - c) / d)
            exit_t = np.nanmin(ts)
            best = min(best, exit_t)
            depth[row, col] = best  # ray parameter equals camera z since d_cam.z == 1
    return depth


def write_grid(path, array):
    h, w = array.shape
    with open(path, "wb") as f:
        f.write(b"SSDG")
        f.write(struct.pack("<IIII", 1, 2, h, w))
        f.write(struct.pack("<%dd" % (h * w), *array.reshape(-1)))


def write_cloud(path, points):
    with open(path, "w") as f:
        for p in points:
            label = (" " + p[4]) if p[4] else ""
            f.write("%.6f %.6f %.6f %.3f%s\n" % (p[0], p[1], p[2], p[3], label))


def write_jsonl(path, records):
    with open(path, "w") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")


SCENES = [
    {
        "scene_id": "toy01",
        "half": 4.0,
        "floor": 1.5,
        "ceil": -1.5,
        "objects": {
            "chair": ([1.2, 1.0, 3.0], [0.8, 1.0, 0.8], 0.92),
            "table": ([-1.0, 1.1, 2.5], [1.4, 0.8, 1.0], 0.85),
            "plant": ([3.2, 1.0, -1.5], [0.5, 1.0, 0.5], 0.70),
        },
        "absent": ["lamp"],
        "frames": [("f0", 0.0, [0, 0, 0], True), ("f1", 0.6, [-0.5, 0, -0.5], False),
                   ("f2", 1.9, [0.5, 0, 0.5], False)],
    },
    {
        "scene_id": "toy02",
        "half": 3.5,
        "floor": 1.4,
        "ceil": -1.4,
        "objects": {
            "bed": ([0.0, 0.9, 2.4], [2.0, 1.0, 1.6], 0.95),
            "chair": ([-2.4, 0.9, 1.0], [0.7, 1.0, 0.7], 0.55),
            "sofa": ([-0.5, 0.9, -2.5], [1.8, 1.0, 0.8], 0.88),
        },
        "absent": ["lamp"],
        "frames": [("g0", 0.0, [0, 0, 0], False), ("g1", -2.6, [0.3, 0, 0.4], False)],
    },
]


def build_scene(scene, rng):
    sid = scene["scene_id"]
    out = ROOT / sid
    out.mkdir(parents=True, exist_ok=True)
    boxes = [(c, e) for c, e, _ in scene["objects"].values()]

    recon = [tuple(p) + (0.0, "") for p in room_surface(scene["half"], scene["floor"], scene["ceil"], 0.25)]
    for c, e in boxes:
        recon += [tuple(p) + (0.0, "") for p in box_surface(c, e, 0.2)]
    for _ in range(6):  # a few floaters for the outlier filter
        recon.append(tuple(rng.uniform(-3, 3, 3)) + (0.0, ""))
    write_cloud(out / "recon.txt", recon)

    frames = []
    for image_id, yaw, pos, with_depth in scene["frames"]:
        r, t = world_to_camera(yaw, pos)
        (out / f"{image_id}.camera.json").write_text(json.dumps(camera_json(r, t), indent=2) + "\n")
        dets = []
        for label, (c, e, conf) in scene["objects"].items():
            box = bbox_of(r, t, c, e)
            if box is not None:
                dets.append({"image_id": image_id, "label": label, "bbox": box, "confidence": conf})
        if image_id == scene["frames"][0][0]:
            dets.append({"image_id": image_id, "label": "lamp", "bbox": [2, 2, 10, 10], "confidence": 0.05})
        write_jsonl(out / f"{image_id}.detections.jsonl", dets)
        frame = {"image_id": image_id, "camera": f"{image_id}.camera.json",
                 "detections": f"{image_id}.detections.jsonl"}
        if with_depth:
            write_grid(out / f"{image_id}.depth.bin", ray_depth(r, t, boxes, scene["half"], scene["floor"], scene["ceil"]))
            frame["depth"] = f"{image_id}.depth.bin"
        frames.append(frame)

    manifest = {"scene_id": sid, "frames": frames, "input_frame": scene["frames"][0][0],
                "reconstruction": "recon.txt", "objects": sorted(list(scene["objects"]) + scene["absent"])}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def build_samples(scene, rng, count=3):
    sid = scene["scene_id"]
    out = ROOT / "samples" / "scene" / sid
    (out / "vlm").mkdir(parents=True, exist_ok=True)
    r, t = world_to_camera(0.0, [0, 0, 0])
    (out / "camera.json").write_text(json.dumps(camera_json(r, t), indent=2) + "\n")
    for n in range(count):
        sdir = out / "samples" / str(n)
        sdir.mkdir(parents=True, exist_ok=True)
        placed = []
        for label, (c, e, conf) in scene["objects"].items():
            jitter = rng.normal(0.0, 0.4, 3) * np.array([1, 0, 1])
            placed.append((label, np.asarray(c) + jitter, e, float(np.clip(conf + rng.normal(0, 0.05), 0.05, 1.0))))
        dets, cloud1, cloud2 = [], [], []
        for label, c, e, conf in placed:
            box = bbox_of(r, t, c, e)
            if box is not None:
                dets.append({"image_id": f"{sid}-s{n}", "label": label, "bbox": box, "confidence": round(conf, 3)})
            for p in box_surface(c, e, 0.25):
                target = cloud1 if p[2] > 0 else cloud2
                target.append(tuple(p) + (round(conf, 3), label))
        write_jsonl(sdir / "pose1.detections.jsonl", dets)
        write_cloud(sdir / "pose1.cloud.txt", cloud1)
        write_cloud(sdir / "pose2.cloud.txt", cloud2)
        boxes = [(c, e) for _, c, e, _ in placed]
        write_grid(sdir / "pose1.depth.bin", ray_depth(r, t, boxes, scene["half"], scene["floor"], scene["ceil"]))
    for label in scene["objects"]:
        yes = [int(v) for v in rng.integers(0, 11, 3)]
        counts = {"label": label}
        for region, y in zip(("left", "center", "right"), yes):
            counts[region] = {"yes": y, "queries": 10}
        fname = label.replace(" ", "_")
        (out / "vlm" / f"{fname}.json").write_text(json.dumps(counts, indent=2) + "\n")


def main():
    rng = np.random.default_rng(7)
    for scene in SCENES:
        build_scene(scene, rng)
        build_samples(scene, rng)
    (ROOT / "config.json").write_text(json.dumps({"image": [H, W, M]}, indent=2) + "\n")


if __name__ == "__main__":
    main()
