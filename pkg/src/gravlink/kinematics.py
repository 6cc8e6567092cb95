"""Platform states, light-time solution, and link geometry assembly.

Conventions used throughout:

* one continuous scenario time t [s]; no UTC/TAI bookkeeping
* Earth-centered inertial frame, aligned with the Earth-fixed frame at t = 0
* spherical Earth of radius 6.371e6 m rotating about +z at OMEGA_EARTH
* point-mass potential, expressed as the positive dimensionless number
  U = GM/(c^2 r), which decreases with altitude
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, GM_EARTH, OMEGA_EARTH, R_EARTH
from .errors import BadAltitude, DegenerateGeometry, NoConvergence

_MIN_RADIUS = 6.3e6     # m, StateVector sanity floor
_MAX_SPEED = 1.1e4      # m/s, StateVector sanity ceiling
_MAX_BETA = 4.0e-5      # LinkGeometry sanity ceiling on |v|/c
_LIGHT_TIME_TOL = 1e-12  # s
_LIGHT_TIME_MAX_ITER = 50
_COINCIDENT_RANGE = 1e-6  # m, below this emitter and receiver coincide


def rotation_z(angle: float) -> np.ndarray:
    """Right-handed rotation matrix about +z."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def earth_rotation_vector() -> np.ndarray:
    """Earth angular velocity [rad/s] in the inertial frame."""
    return np.array([0.0, 0.0, OMEGA_EARTH])


@dataclass(frozen=True)
class StateVector:
    """Inertial position/velocity of a platform at a scenario epoch.

    position : m, velocity : m/s, epoch : s.
    """

    position: np.ndarray
    velocity: np.ndarray
    epoch: float

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        vel = np.asarray(self.velocity, dtype=float)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)
        r = float(np.linalg.norm(pos))
        if r <= _MIN_RADIUS:
            raise BadAltitude(f"|position| = {r:.4e} m is below {_MIN_RADIUS:.1e} m")
        v = float(np.linalg.norm(vel))
        if v >= _MAX_SPEED:
            raise ValueError(f"|velocity| = {v:.4e} m/s exceeds {_MAX_SPEED:.1e} m/s")


def circular_orbit_state(
    semi_major_axis: float,
    inclination: float,
    raan: float,
    phase: float,
    t: float,
) -> StateVector:
    """Two-body circular orbit state at time t.

    Orbit plane is +x/+y rotated by inclination about +x, then by the node
    angle about +z; phase is the in-plane angle at t = 0. |position| equals
    the semi-major axis exactly and speed is sqrt(GM/a).

    Raises BadAltitude outside 6.5e6 <= a <= 5e7 m.
    """
    a = float(semi_major_axis)
    if not 6.5e6 <= a <= 5.0e7:
        raise BadAltitude(f"semi-major axis {a:.4e} m outside [6.5e6, 5e7] m")
    n = math.sqrt(GM_EARTH / a**3)          # mean motion [rad/s]
    u = phase + n * t
    pos_plane = np.array([a * math.cos(u), a * math.sin(u), 0.0])
    vel_plane = np.array([-a * n * math.sin(u), a * n * math.cos(u), 0.0])
    ci, si = math.cos(inclination), math.sin(inclination)
    rot_x = np.array([[1.0, 0.0, 0.0], [0.0, ci, -si], [0.0, si, ci]])
    rot = rotation_z(raan) @ rot_x
    return StateVector(position=rot @ pos_plane, velocity=rot @ vel_plane, epoch=t)


def ground_station_state(lat: float, lon: float, alt: float, t: float) -> StateVector:
    """State of a station fixed to the rotating spherical Earth.

    lat/lon in radians, alt in meters above the mean radius.
    """
    if abs(lat) > math.pi / 2:
        raise ValueError(f"latitude {lat} rad outside [-pi/2, pi/2]")
    r = R_EARTH + alt
    body = r * np.array(
        [
            math.cos(lat) * math.cos(lon),
            math.cos(lat) * math.sin(lon),
            math.sin(lat),
        ]
    )
    pos = rotation_z(OMEGA_EARTH * t) @ body
    vel = np.cross(earth_rotation_vector(), pos)
    return StateVector(position=pos, velocity=vel, epoch=t)


def ground_station_acceleration(lat: float, lon: float, alt: float, t: float) -> np.ndarray:
    """Centripetal acceleration of the rotating station [m/s^2]."""
    pos = ground_station_state(lat, lon, alt, t).position
    w = earth_rotation_vector()
    return np.cross(w, np.cross(w, pos))


class CircularOrbit:
    """Analytic circular-orbit state source."""

    def __init__(self, semi_major_axis: float, inclination: float = 0.0,
                 raan: float = 0.0, phase: float = 0.0):
        # constructor validates the axis once so state() can't fail later
        circular_orbit_state(semi_major_axis, inclination, raan, phase, 0.0)
        self.semi_major_axis = float(semi_major_axis)
        self.inclination = float(inclination)
        self.raan = float(raan)
        self.phase = float(phase)

    def state(self, t: float) -> StateVector:
        return circular_orbit_state(
            self.semi_major_axis, self.inclination, self.raan, self.phase, t
        )

    def acceleration(self, t: float) -> np.ndarray:
        pos = self.state(t).position
        return -GM_EARTH / self.semi_major_axis**3 * pos

    def period(self) -> float:
        """Orbital period 2*pi*sqrt(a^3/GM) [s]."""
        return 2.0 * math.pi * math.sqrt(self.semi_major_axis**3 / GM_EARTH)


class GroundStation:
    """Earth-fixed station state source."""

    def __init__(self, lat: float, lon: float, alt: float = 0.0):
        ground_station_state(lat, lon, alt, 0.0)
        self.lat = float(lat)
        self.lon = float(lon)
        self.alt = float(alt)

    def state(self, t: float) -> StateVector:
        return ground_station_state(self.lat, self.lon, self.alt, t)

    def acceleration(self, t: float) -> np.ndarray:
        return ground_station_acceleration(self.lat, self.lon, self.alt, t)


class StaticPlatform:
    """Non-moving platform; handy for controlled-geometry checks."""

    def __init__(self, position):
        self.position = np.asarray(position, dtype=float)
        StateVector(position=self.position, velocity=np.zeros(3), epoch=0.0)

    def state(self, t: float) -> StateVector:
        return StateVector(position=self.position, velocity=np.zeros(3), epoch=t)

    def acceleration(self, t: float) -> np.ndarray:
        return np.zeros(3)


def newtonian_potential(position) -> float:
    """Dimensionless potential U = GM/(c^2 r); positive, larger nearer Earth."""
    r = float(np.linalg.norm(np.asarray(position, dtype=float)))
    if r <= 0.0:
        raise ValueError("position magnitude must be positive")
    return GM_EARTH / (C_LIGHT**2 * r)


def solve_light_time(emit_state: StateVector, receiver_trajectory, t_emit: float):
    """Propagation time and arrival direction from emitter to a moving receiver.

    Fixed-point iteration T <- |r_recv(t_emit + T) - r_emit| / c, run until
    the update is below 1e-12 s.

    Returns
    -------
    (T, n_hat) : float [s], unit 3-vector
        n_hat points emitter -> receiver, evaluated at reception.

    Raises
    ------
    DegenerateGeometry
        Emitter and receiver closer than 1e-6 m.
    NoConvergence
        More than 50 iterations without meeting the tolerance.
    """
    r_emit = emit_state.position
    t_flight = 0.0
    for _ in range(_LIGHT_TIME_MAX_ITER):
        separation = receiver_trajectory.state(t_emit + t_flight).position - r_emit
        rng = float(np.linalg.norm(separation))
        if rng < _COINCIDENT_RANGE:
            raise DegenerateGeometry(
                f"emitter and receiver separated by {rng:.3e} m; direction undefined"
            )
        t_next = rng / C_LIGHT
        if abs(t_next - t_flight) < _LIGHT_TIME_TOL:
            return t_next, separation / rng
        t_flight = t_next
    raise NoConvergence(
        f"light-time iteration did not settle in {_LIGHT_TIME_MAX_ITER} steps"
    )


@dataclass(frozen=True)
class LinkGeometry:
    """Everything the relativistic link model needs for one emission epoch.

    beta1/beta2/beta3 are v/c of ground station at emission, spacecraft at
    reception, and ground station at retro-reflected reception. n12 and n23
    are the light directions of the up and down legs at their respective
    receptions. U1..U3 are the dimensionless potentials at the same three
    events, a1 the station's centripetal acceleration [m/s^2], t_up the
    upward propagation time [s]. d1 and d2 project beta1/beta2 on n12;
    d3 projects beta3 on n23.
    """

    beta1: np.ndarray
    beta2: np.ndarray
    beta3: np.ndarray
    n12: np.ndarray
    n23: np.ndarray
    U1: float
    U2: float
    U3: float
    a1: np.ndarray
    t_up: float
    d1: float
    d2: float
    d3: float

    def __post_init__(self):
        for name in ("beta1", "beta2", "beta3", "n12", "n23", "a1"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        for name in ("n12", "n23"):
            norm = float(np.linalg.norm(getattr(self, name)))
            if abs(norm - 1.0) > 1e-9:
                raise DegenerateGeometry(f"|{name}| = {norm:.12f}, expected 1")
        for name in ("beta1", "beta2", "beta3"):
            b = float(np.linalg.norm(getattr(self, name)))
            if b >= _MAX_BETA:
                raise ValueError(f"|{name}| = {b:.3e} exceeds {_MAX_BETA:.1e}")
        for name in ("U1", "U2", "U3"):
            u = getattr(self, name)
            if not 0.0 < u < 1e-8:
                raise ValueError(f"{name} = {u:.3e} outside (0, 1e-8)")


def build_link_geometry(gs_trajectory, sc_trajectory, t_emit: float) -> LinkGeometry:
    """Assemble the up-and-down link geometry for one emission epoch.

    The ground station emits at t_emit; the spacecraft retro-reflects
    instantly at reception; the station receives the return. Light times for
    both legs are solved independently.
    """
    s1 = gs_trajectory.state(t_emit)
    t_up, n12 = solve_light_time(s1, sc_trajectory, t_emit)
    s2 = sc_trajectory.state(t_emit + t_up)
    t_down, n23 = solve_light_time(s2, gs_trajectory, t_emit + t_up)
    s3 = gs_trajectory.state(t_emit + t_up + t_down)

    beta1 = s1.velocity / C_LIGHT
    beta2 = s2.velocity / C_LIGHT
    beta3 = s3.velocity / C_LIGHT
    return LinkGeometry(
        beta1=beta1,
        beta2=beta2,
        beta3=beta3,
        n12=n12,
        n23=n23,
        U1=newtonian_potential(s1.position),
        U2=newtonian_potential(s2.position),
        U3=newtonian_potential(s3.position),
        a1=gs_trajectory.acceleration(t_emit),
        t_up=t_up,
        d1=float(n12 @ beta1),
        d2=float(n12 @ beta2),
        d3=float(n23 @ beta3),
    )
