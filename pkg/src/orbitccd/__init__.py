"""Guaranteed continuous collision detection for polygons under rational motions.

Motions are rational Bezier curves of affine displacements. A displacement
ball in a mass-distribution metric sweeps a polygon into a "fat" polygon
bounded by spheres and hyperboloids; testing that shape against the fixed
polygon and subdividing the motion where needed either certifies that no
collision occurs or returns suspect parameter intervals.
"""
from .detector import (DetectorConfig, IntervalList, PairResult, PrecomputedPolygon, Report,
                       auto_mass_distribution, collide_surfaces, collision, collision_report,
                       intersection, precompute)
from .errors import (ArcTooLong, BallTooLarge, DegenerateMass, NonPositiveWeight,
                     NonSimplePolygon, OrbitCCDError, ParameterOutOfDomain, ParseError,
                     SingularDisplacement, ValidationError)
from .geometry import Polygon3
from .metric import (Displacement, LineMetricData, MassDistribution, PlaneMetricData,
                     build_mass_distribution, displacement_distance2, displacement_inner,
                     distortion_rate, distortion_rate2, equivalent_vertex_masses,
                     line_metric_data, metric_coordinates, plane_metric_data)
from .motion import (Ball12, RationalMotion, constant_motion, control_ball, curvature_ball,
                     evaluate, evaluate_many, miniball_control, quaternion_motion, subdivide)
from .orbits import FatEdge, FatFace, FatVertex, fat_edge, fat_face, fat_vertex
from .scene_io import Scene, decompose, load_scene, parse_scene, serialize_scene

__version__ = "0.1.0"
