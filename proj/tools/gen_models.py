#!/usr/bin/env python3
"""Writes the bundled robot model JSON files under configs/."""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "configs"

FINGER_LIMITS = [(-0.47, 0.47), (-0.196, 1.61), (-0.174, 1.709), (-0.227, 1.618)]
THUMB_LIMITS = [(0.263, 1.396), (-0.105, 1.163), (-0.189, 1.644), (-0.162, 1.719)]
FINGER_LINKS = [0.054, 0.0384, 0.0267]
TIP = 0.03


def joint(name, parent, axis, xyz, limits, accel=10.0, jerk=1.0e4):
    return {
        "name": name,
        "parent": parent,
        "axis": axis,
        "origin": {"xyz": xyz, "rpy": [0.0, 0.0, 0.0]},
        "limits": {"lower": limits[0], "upper": limits[1], "accel": accel, "jerk": jerk},
    }


def hand(parent, base, prefix=""):
    """Four-finger 16-joint hand; fingers extend along +z and curl towards +x."""
    joints, points, spheres = [], [], []
    bx, by, bz = base
    for f, (fname, y) in enumerate([("index", 0.045), ("middle", 0.0), ("ring", -0.045)]):
        names = [f"{prefix}{fname}_{k}" for k in range(4)]
        joints.append(joint(names[0], parent, [1, 0, 0], [bx, by + y, bz + 0.095], FINGER_LIMITS[0]))
        joints.append(joint(names[1], names[0], [0, 1, 0], [0, 0, 0.0164], FINGER_LIMITS[1]))
        joints.append(joint(names[2], names[1], [0, 1, 0], [0, 0, FINGER_LINKS[0]], FINGER_LIMITS[2]))
        joints.append(joint(names[3], names[2], [0, 1, 0], [0, 0, FINGER_LINKS[1]], FINGER_LIMITS[3]))
        points.append({"name": f"{fname}_tip", "frame": names[3], "offset": [0, 0, FINGER_LINKS[2] + TIP]})
        spheres.append({"name": f"{fname}_tip_s", "frame": names[3], "offset": [0, 0, FINGER_LINKS[2] + 0.02], "radius": 0.015})
        spheres.append({"name": f"{fname}_mid_s", "frame": names[2], "offset": [0, 0, 0.02], "radius": 0.015})
    names = [f"{prefix}thumb_{k}" for k in range(4)]
    joints.append(joint(names[0], parent, [1, 0, 0], [bx - 0.01, by + 0.035, bz + 0.03], THUMB_LIMITS[0]))
    joints.append(joint(names[1], names[0], [0, 0, 1], [0, 0.005, 0], THUMB_LIMITS[1]))
    joints.append(joint(names[2], names[1], [0, 0, -1], [0, 0.05, 0], THUMB_LIMITS[2]))
    joints.append(joint(names[3], names[2], [0, 0, -1], [0, 0.04, 0], THUMB_LIMITS[3]))
    points.append({"name": "thumb_tip", "frame": names[3], "offset": [0, 0.04 + TIP * 0.5, 0]})
    spheres.append({"name": "thumb_tip_s", "frame": names[3], "offset": [0, 0.04, 0], "radius": 0.015})
    spheres.append({"name": "palm_s", "frame": parent, "offset": [bx + 0.01, by, bz + 0.05], "radius": 0.055})
    return joints, points, spheres


def write(name, model):
    (OUT / name).write_text(json.dumps(model, indent=2) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    j, p, s = hand("base", [0.0, 0.0, 0.0])
    write("hand16.json", {"name": "hand16", "joints": j, "body_points": p, "collision_spheres": s})

    arm_limits = [2.96, 2.09, 2.96, 2.09, 2.96, 2.09, 3.05]
    arm_axes = [[0, 0, 1], [0, 1, 0], [0, 0, 1], [0, -1, 0], [0, 0, 1], [0, 1, 0], [0, 0, 1]]
    arm_xyz = [[0, 0, 0.36], [0, 0, 0], [0, 0, 0.42], [0, 0, 0], [0, 0, 0.40], [0, 0, 0], [0, 0, 0.126]]
    joints, parent = [], "base"
    for k in range(7):
        name = f"arm_{k + 1}"
        joints.append(joint(name, parent, arm_axes[k], arm_xyz[k], (-arm_limits[k], arm_limits[k])))
        parent = name
    spheres = [
        {"name": "link1_s", "frame": "arm_1", "offset": [0, 0, -0.12], "radius": 0.09},
        {"name": "link2_s", "frame": "arm_2", "offset": [0, 0, 0.2], "radius": 0.08},
        {"name": "link3_s", "frame": "arm_3", "offset": [0, 0, 0.0], "radius": 0.08},
        {"name": "link4_s", "frame": "arm_4", "offset": [0, 0, 0.2], "radius": 0.07},
        {"name": "link5_s", "frame": "arm_5", "offset": [0, 0, 0.0], "radius": 0.07},
        {"name": "link6_s", "frame": "arm_6", "offset": [0, 0, 0.0], "radius": 0.065},
        {"name": "flange_s", "frame": "arm_7", "offset": [0, 0, 0.0], "radius": 0.055},
    ]
    hj, hp, hs = hand("arm_7", [0.0, 0.0, 0.05])
    write("desk23.json", {"name": "desk23", "joints": joints + hj, "body_points": hp, "collision_spheres": spheres + hs})

    planar = []
    parent = "base"
    for k, xyz in enumerate([[0, 0, 0], [0.4, 0, 0], [0.3, 0, 0]]):
        name = f"link_{k + 1}"
        planar.append(joint(name, parent, [0, 0, 1], xyz, (-2.5, 2.5)))
        parent = name
    write("planar3.json", {
        "name": "planar3",
        "joints": planar,
        "body_points": [{"name": "tip", "frame": "link_3", "offset": [0.2, 0, 0]}],
        "collision_spheres": [
            {"name": "elbow_s", "frame": "link_2", "offset": [0, 0, 0], "radius": 0.05},
            {"name": "wrist_s", "frame": "link_3", "offset": [0, 0, 0], "radius": 0.05},
            {"name": "tip_s", "frame": "link_3", "offset": [0.2, 0, 0], "radius": 0.04},
        ],
    })


if __name__ == "__main__":
    main()
