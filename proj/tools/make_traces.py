#!/usr/bin/env python3
# Copyright 2026 The telelink Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the shipped operator traces and the reach-and-place waypoints.

The reach-and-place operator is synthesised from a joint-space motion of the
arm model: the hand tracker follows the tool position (plus an arbitrary
operator-frame offset, removed by calibration) and the wrist IMU reports the
tool-frame gravity direction.  Usage: tools/make_traces.py [repo-root]
"""

import json
import math
import pathlib
import sys

import numpy as np

ROOT = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).parents[1])
RATE_HZ = 100
STANCE_Y = 0.15
OPERATOR_OFFSET = np.array([0.25, -0.30, 1.05])


def rot(axis, q):
    axis = np.asarray(axis, dtype=float)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(q) * k + (1 - math.cos(q)) * (k @ k)


def rpy(r, p, y):
    return rot([0, 0, 1], y) @ rot([0, 1, 0], p) @ rot([1, 0, 0], r)


class Chain:
    def __init__(self, path):
        self.links = json.loads(path.read_text())["links"]

    def fk(self, q, link):
        R, p, i = np.eye(3), np.zeros(3), 0
        for item in self.links:
            o = item.get("origin", {})
            p = p + R @ np.array(o.get("xyz", [0, 0, 0]), dtype=float)
            R = R @ rpy(*o.get("rpy", [0, 0, 0]))
            if "joint" in item:
                R = R @ rot(item["joint"]["axis"], q[i])
                i += 1
            if item["name"] == link:
                return R, p
        raise KeyError(link)


def fmt_row(t, values):
    return f"{t:.9f} " + " ".join(f"{v:.17g}" for v in values)


def feet(left=(0.0, STANCE_Y, 0.0), right=(0.0, -STANCE_Y, 0.0)):
    return [0.0, 0.0, 0.0, *left, *right]


HEADER = ("# t_s waist_x waist_y waist_yaw lf_x lf_y lf_yaw rf_x rf_y rf_yaw "
          "hand_x hand_y hand_z imu_gx imu_gy imu_gz glove...\n")


def write(name, rows, comment):
    path = ROOT / "traces" / name
    path.write_text(f"# {comment}\n" + HEADER + "\n".join(rows) + "\n")
    print(f"wrote {path} ({len(rows)} samples)")


def smooth(a, b, s):
    s = min(max(s, 0.0), 1.0)
    w = s * s * (3 - 2 * s)
    return a + (b - a) * w


def constant_velocity():
    # Left foot 0.10 m beyond the idle disc: v = k_linear * 0.10 = 0.2 m/s.
    rows = []
    n = 5 * RATE_HZ
    for i in range(n + 1):
        t = i / RATE_HZ
        left = (0.18, STANCE_Y, 0.0) if i < n else (0.0, STANCE_Y, 0.0)
        rows.append(fmt_row(t, feet(left) + [0.0] * 6))
    write("constant-velocity.trace", rows, "0.2 m/s forward for 5 s, then idle")


def idle():
    rows = [fmt_row(i / RATE_HZ, feet() + [0.0] * 6) for i in range(3 * RATE_HZ + 1)]
    write("idle.trace", rows, "operator standing still")


def reach_and_place():
    chain = Chain(ROOT / "models" / "arm6.json")
    config_path = ROOT / "configs" / "reach-and-place.json"
    config = json.loads(config_path.read_text())
    home = np.array(config["arm"]["home"], dtype=float)
    grasp = np.array([0.45, 0.15, 1.05, 0.0, -0.35, 0.1])
    lift = np.array([0.10, -0.10, 1.00, 0.0, -0.25, 0.0])
    place = np.array([-0.40, 0.20, 0.95, 0.0, -0.45, -0.1])
    # (time, joint target, grip closure)
    keys = [(0.0, home, 0.0), (1.0, home, 0.0), (3.5, grasp, 0.0), (5.0, grasp, 1.0),
            (6.5, lift, 1.0), (8.5, place, 1.0), (10.0, place, 0.0), (11.5, home, 0.0),
            (12.0, home, 0.0)]

    def at(t):
        for (t0, q0, g0), (t1, q1, g1) in zip(keys, keys[1:]):
            if t <= t1:
                s = (t - t0) / (t1 - t0)
                return smooth(q0, q1, s), smooth(g0, g1, s)
        return keys[-1][1], keys[-1][2]

    _, p_home = chain.fk(home, "tool")
    rows = []
    for i in range(int(keys[-1][0] * RATE_HZ) + 1):
        t = i / RATE_HZ
        q, grip = at(t)
        R, p = chain.fk(q, "tool")
        tracker = p - p_home + OPERATOR_OFFSET
        g = R.T @ np.array([0.0, 0.0, -1.0])
        left_glove = [0.0] * 20
        right_glove = [0.3 * grip, 0.3 * grip, 1.0 * grip, 0.8 * grip] + [0.0, 1.2 * grip,
                                                                           1.2 * grip, 0.9 * grip] * 4
        rows.append(fmt_row(t, feet() + list(tracker) + list(g) + left_glove + right_glove))
    write("reach-and-place.trace", rows, "reach, grasp, lift, place, release, return")

    waypoints = []
    for name, q in (("grasp", grasp), ("lift", lift), ("place", place)):
        _, p = chain.fk(q, "tool")
        waypoints.append({"name": name, "position": [round(float(v), 6) for v in p]})
    config["waypoints"] = waypoints
    text = json.dumps(config, indent=2) + "\n"
    config_path.write_text(text)
    print(f"updated waypoints in {config_path}")


if __name__ == "__main__":
    (ROOT / "traces").mkdir(exist_ok=True)
    constant_velocity()
    idle()
    reach_and_place()
