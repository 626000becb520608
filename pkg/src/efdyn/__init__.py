"""Emden-Fowler equations ``q_YY = alpha Y**(-lambda-2) q**n``: phase plane, invariants,
closed-form and parametric solutions, and numerical integration."""

from .errors import DomainError, IntegrationError, QuadratureError, UnsupportedCaseError
from .model import (CenterCondition, EfParams, Equilibria, EquilibriumPoint, Kind,
                    PointIndex, RosenauStatus, SystemState, center_condition, classify,
                    fixed_points, jacobian, rosenau_status, table1, trace_det, vector_field)
from .invariants import (Drift, PhysicalState, ermakov_c_invariant, ermakov_invariant,
                         invariant_drift, invariant_first, invariant_second,
                         pseudo_hamiltonian)
from .closedforms import ClosedForm, Family, closed_form, ef_residual
from .parametric import (EllipticOrbit, ParametricCurve, curve_first, curve_lambda0,
                         curve_second, elliptic_orbit)
from .dynamics import (Method, PeriodReport, Trajectory, detect_period, integrate_physical,
                       integrate_system, invariant_transform, js_coordinates, kamke_inverse,
                       kamke_map)

__version__ = "0.1.0"
