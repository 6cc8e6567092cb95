"""Physical constants and Earth model parameters (SI units)."""

C_LIGHT = 2.99792458e8  # speed of light [m/s]
GM_EARTH = 3.986004418e14  # geocentric gravitational constant [m^3/s^2]
R_EARTH = 6.371e6  # mean Earth radius [m]
OMEGA_EARTH = 7.2921159e-5  # Earth sidereal rotation rate [rad/s]
G_STD = 9.80665  # standard surface gravity [m/s^2]

HBAR = 1.054571817e-34  # reduced Planck constant [J s]
EV = 1.602176634e-19  # electron volt [J]
MU_B_EV = 5.7884e-5  # Bohr magneton [eV/T]

SECONDS_PER_DAY = 86400.0
