"""Ammann-A2 tilings: exact generation, bounded distortions, combinatorial
amalgamation and anchor codes."""
from __future__ import annotations

__version__ = "0.1.0"

from .numerics import GoldenInt, GoldenPoint, Similarity
from .planar_map import CombTiling, map_isomorphism, automorphism_count
from .generator import build_theta_patch, build_supertile, disk_patch, to_combinatorial, enumerate_W
from .distortion import make_field, apply, verify_bound
from .amalgamation import build_reference_maps, color_red, resolve_partners, amalgamate_patch
from .codec import AnchoredTiling, extract_code, reconstruct

__all__ = [
    "GoldenInt", "GoldenPoint", "Similarity", "CombTiling", "map_isomorphism",
    "automorphism_count", "build_theta_patch", "build_supertile", "disk_patch",
    "to_combinatorial", "enumerate_W", "make_field", "apply", "verify_bound",
    "build_reference_maps", "color_red", "resolve_partners", "amalgamate_patch",
    "AnchoredTiling", "extract_code", "reconstruct",
]
