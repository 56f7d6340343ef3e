#pragma once

#include "mshand/musculature.hpp"

namespace mshand {

/// Built-in 16-joint right-hand skeleton: wrist plus MCP/PIP/DIP chains for
/// index, middle, ring and little fingers and a CMC/MCP/IP thumb chain, with
/// fingertip markers on the distal joints. Offsets approximate an average
/// 19 cm hand (x distal, y radial, z dorsal); limits approximate anatomical
/// flexion/extension ranges. Values are documented approximations, editable
/// via the JSON tree config.
KinematicTree default_tree();

/// Built-in 31-muscle set mirroring standard sub-wrist hand-muscle
/// nomenclature (FDS/FDP/EDC 2-5, EIP, lumbricals, dorsal/palmar interossei,
/// and the thumb group FPL/FPB/EPL/EPB/APB/APL/ADP). Attachment offsets,
/// peak forces and length parameters are plausible approximations, with
/// l_opt/l_slack derived from the rest-pose path length so every muscle sits
/// at optimal length in the rest pose.
std::vector<MuscleDef> default_muscle_defs(const KinematicTree& tree);

Musculature default_musculature(const KinematicTree& tree);

/// Reduced benchmark system: the default skeleton with every axis locked
/// except ring MCP/PIP flexion (two hinge joints), driven by one palmar
/// flexor and one dorsal extensor routed in the finger plane so their torques
/// are pure flexion/extension.
KinematicTree reduced_ring_tree();

Musculature reduced_ring_musculature(const KinematicTree& tree);

}  // namespace mshand
