"""Independent scalar oracle for the rotorcraft power model.

Run with `python3 tests/oracles/energy_oracle.py`; the printed values are
frozen in tests/oracle_values.hpp.
"""
from mpmath import mp, mpf, sqrt

mp.dps = 40

rho = mpf("1.225")
s = mpf("0.2449")
A = mpf("6.61")
omega = mpf("78")
R = mpf("1.45")
W = mpf("17799")
delta = mpf("0.045")
k = mpf("0.052")
v0 = mpf("26.45")
u_tip = mpf("112.776")
d0 = mpf("0.01")
v_cruise = mpf("73.762")


def hover():
    blade = delta / 8 * rho * s * A * omega**3 * R**3
    induced = (1 + k) * W ** mpf("1.5") / sqrt(2 * rho * A)
    return blade, induced


def propulsion(v):
    blade, induced = hover()
    b = blade * (1 + 3 * v**2 / u_tip**2)
    x = v**2 / (2 * v0**2)
    i = induced * sqrt(sqrt(1 + x**2) - x)
    p = d0 * rho * s * A * v**3 / 2
    return b, i, p


def show(name, value):
    print(f"inline constexpr double {name} = {mp.nstr(value, 17)};")


hb, hi = hover()
show("kHoverBlade", hb)
show("kHoverInduced", hi)
show("kHoverTotal", hb + hi)
cb, ci, cp = propulsion(v_cruise)
show("kCruiseBlade", cb)
show("kCruiseInduced", ci)
show("kCruiseParasite", cp)
show("kCruiseTotal", cb + ci + cp)
show("kKwhPerMeter", (cb + ci + cp) / v_cruise / mpf("3.6e6"))
show("kKwhPerCruiseSecond", (cb + ci + cp) / mpf("3.6e6"))
