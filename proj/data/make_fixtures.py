#!/usr/bin/env python3
"""Regenerates the reference demonstrations in data/demos/.

Each demo is a teleoperation-style recording sampled at 20 Hz with the hand
moving at roughly 0.2 m/s (1 cm between samples) and the gripper changing by
at most 1 cm per sample. Run from the repository root.
"""
import json
import math
import pathlib

DT = 0.05
STEP = 0.01
OPEN = 0.08
HOME = (0.0, 0.0, 0.20)
HOVER = 0.08


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Recorder:
    def __init__(self, start, gripper):
        self.points = [(start, gripper)]

    @property
    def pos(self):
        return self.points[-1][0]

    @property
    def grip(self):
        return self.points[-1][1]

    def move(self, target):
        p = self.pos
        n = max(1, math.ceil(math.dist(p, target) / STEP - 1e-9))
        for i in range(1, n + 1):
            f = i / n
            self.points.append((tuple(a + (b - a) * f for a, b in zip(p, target)), self.grip))

    def grip_to(self, width, hold=2):
        g = self.grip
        n = max(1, math.ceil(abs(width - g) / STEP - 1e-9))
        for i in range(1, n + 1):
            self.points.append((self.pos, round(g + (width - g) * i / n, 6)))
        for _ in range(hold):
            self.points.append((self.pos, width))

    def hold(self, n):
        for _ in range(n):
            self.points.append(self.points[-1])

    def mark(self):
        return len(self.points)


def pick(rec, block, lift=HOVER):
    rec.move(add(block, (0, 0, HOVER)))
    rec.move(block)
    rec.grip_to(0.0)
    rec.move(add(block, (0, 0, lift)))


def place(rec, goal, release=True):
    rec.move(add(goal, (0, 0, HOVER)))
    rec.move(goal)
    if release:
        rec.grip_to(OPEN)
        rec.move(add(goal, (0, 0, HOVER)))


def document(task, source, segments, rec):
    pts = rec.points
    return {
        "format_version": 1,
        "task": task,
        "source_id": source,
        "g_max": OPEN,
        "segments": segments,
        "waypoints": [
            {"t": round(i * DT, 6), "p": [round(c, 6) for c in p], "g": g}
            for i, (p, g) in enumerate(pts)
        ],
    }


def pick_place():
    block, goal = (0.10, -0.12, 0.02), (-0.12, 0.14, 0.12)
    rec = Recorder(HOME, OPEN)
    pick(rec, block)
    rec.move(goal)
    rec.hold(5)
    seg = {"label": "move_block", "anchor_start": list(block), "anchor_goal": list(goal), "count": rec.mark()}
    return document("pick_place", "reference-pick-place-v1", [seg], rec)


def push():
    block, goal = (-0.10, -0.10, 0.02), (0.12, 0.08, 0.02)
    rec = Recorder(HOME, OPEN)
    pick(rec, block, lift=0.03)
    rec.move(add(goal, (0, 0, 0.03)))
    rec.move(goal)
    rec.grip_to(OPEN)
    rec.move(add(goal, (0, 0, 0.06)))
    seg = {"label": "push_block", "anchor_start": list(block), "anchor_goal": list(goal), "count": rec.mark()}
    return document("push", "reference-push-v1", [seg], rec)


def stack():
    a, b = (0.12, -0.10, 0.02), (-0.14, -0.06, 0.02)
    lower, upper = (0.0, 0.12, 0.02), (0.0, 0.12, 0.06)
    rec = Recorder(HOME, OPEN)
    pick(rec, a)
    place(rec, lower)
    first = rec.mark()
    pick(rec, b)
    place(rec, upper)
    segs = [
        {"label": "move_block_one", "anchor_start": list(a), "anchor_goal": list(lower), "count": first},
        {"label": "move_block_two", "anchor_start": list(b), "anchor_goal": list(upper), "count": rec.mark() - first},
    ]
    return document("stack", "reference-stack-v1", segs, rec)


def main():
    out = pathlib.Path(__file__).resolve().parent / "demos"
    out.mkdir(exist_ok=True)
    manifest = {}
    for name, doc in (("pick_place", pick_place()), ("push", push()), ("stack", stack())):
        path = out / f"{name}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        manifest[path.name] = {
            "task": doc["task"],
            "segments": len(doc["segments"]),
            "segment_counts": [s["count"] for s in doc["segments"]],
            "waypoints": len(doc["waypoints"]),
        }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
