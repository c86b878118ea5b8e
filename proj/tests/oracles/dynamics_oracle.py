"""Independent reference values for the dynamics tests.

Uses closed-form driven amplitude solutions for the square pulse, direct
quadrature of the linear response for the gaussian pulse, and a plain
product-basis Lindblad integration (scipy solve_ivp, DOP853) for coherent
drives. No code is shared with the C++ implementation.
"""
import numpy as np
from scipy import integrate


def rates(kr, theta=np.pi / 2):
    c2 = np.cos(theta) ** 2
    a, b = 1 - c2, 1 - 3 * c2
    g12 = 1.5 * (a * np.sin(kr) / kr + b * (np.cos(kr) / kr**2 - np.sin(kr) / kr**3))
    l12 = 1.5 * (a * np.cos(kr) / kr - b * (np.sin(kr) / kr**2 + np.cos(kr) / kr**3))
    return 1.0, g12, l12


def square_scan(gs, step=0.01, tmax=10.0):
    # Matched carrier: beta(0) = sqrt(gs/T) * (2/gs) * (1 - exp(-gs T/2)), peak at t = 0.
    best = (0.0, 0.0)
    for T in np.arange(step, tmax, step):
        p = (4.0 / (gs * T)) * (1 - np.exp(-gs * T / 2)) ** 2
        if p > best[1]:
            best = (T, p)
    return best


def gaussian_peak(gs, width):
    # xi(t) = (2 pi w^2)^(-1/4) exp(-t^2/(4 w^2)); beta(t) = sqrt(gs) int xi(t') e^{-gs (t-t')/2} dt'
    norm = (2 * np.pi * width**2) ** -0.25

    def beta(t):
        f = lambda tp: norm * np.exp(-tp * tp / (4 * width**2)) * np.exp(-gs * (t - tp) / 2)
        return np.sqrt(gs) * integrate.quad(f, -12 * width, t, epsabs=1e-13, epsrel=1e-12)[0]

    ts = np.linspace(-3 * width, 6 * width + 4 / gs, 2001)
    vals = np.array([beta(t) ** 2 for t in ts])
    i = int(np.argmax(vals))
    from scipy.optimize import minimize_scalar
    r = minimize_scalar(lambda t: -beta(t) ** 2, bracket=(ts[i - 1], ts[i], ts[i + 1]), tol=1e-12)
    return -r.fun


def gaussian_scan(gs, step=0.01, wmax=3.0):
    best = (0.0, 0.0)
    for w in np.arange(0.1, wmax, step):
        p = gaussian_peak(gs, w)
        if p > best[1]:
            best = (w, p)
    return best


# --- coherent drive: product basis |e>=(1,0), |g>=(0,1) per atom --------------
sm = np.array([[0, 0], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)
s1 = np.kron(sm, I2)
s2 = np.kron(I2, sm)
ee = np.kron([1, 0], [1, 0]).astype(complex)
gg = np.kron([0, 1], [0, 1]).astype(complex)
eg = np.kron([1, 0], [0, 1]).astype(complex)
ge = np.kron([0, 1], [1, 0]).astype(complex)
ket_s = (eg + ge) / np.sqrt(2)
ket_a = (eg - ge) / np.sqrt(2)


def coherent_run(kr, alpha=1.0, channel="s", theta=np.pi / 2, rtol=1e-11, atol=1e-13):
    g, g12, l12 = rates(kr, theta)
    G = g + g12 if channel == "s" else g - g12
    phase = l12 / 2 if channel == "s" else -l12 / 2
    S = (s1 + s2) / np.sqrt(2)
    A = (s1 - s2) / np.sqrt(2)
    L_s = np.sqrt(g + g12) * S
    L_a = np.sqrt(g - g12) * A
    Ldrive = L_s if channel == "s" else L_a
    H0 = -(l12 / 2) * (s1.conj().T @ s2 + s2.conj().T @ s1)
    jumps = [L_s, L_a]

    def xi(t):
        return np.sqrt(G) * np.exp((G / 2 + 1j * phase) * t) if t < 0 else 0.0

    def rhs(t, y):
        rho = y.reshape(4, 4)
        drive = alpha * xi(t)
        H = H0 + 1j * (drive * Ldrive.conj().T - np.conj(drive) * Ldrive)
        d = -1j * (H @ rho - rho @ H)
        for L in jumps:
            LdL = L.conj().T @ L
            d += L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
        return d.reshape(-1)

    rho0 = np.outer(gg, gg.conj()).reshape(-1)
    t0 = -40.0 / G
    sol1 = integrate.solve_ivp(rhs, (t0, 0.0), rho0, method="DOP853", rtol=rtol, atol=atol,
                               dense_output=True)
    sol2 = integrate.solve_ivp(rhs, (0.0, 10.0), sol1.y[:, -1], method="DOP853", rtol=rtol,
                               atol=atol, dense_output=True)

    def pops(t):
        y = sol1.sol(t) if t <= 0 else sol2.sol(t)
        rho = y.reshape(4, 4)
        f = lambda v: np.real(v.conj() @ rho @ v)
        return f(gg), f(ket_s), f(ket_a), f(ee)

    target = 1 if channel == "s" else 2
    ts = np.concatenate([np.linspace(t0 * 0.25, 0, 4001), np.linspace(0, 10, 4001)[1:]])
    vals = [pops(t)[target] for t in ts]
    i = int(np.argmax(vals))
    from scipy.optimize import minimize_scalar
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
    r = minimize_scalar(lambda t: -pops(t)[target], bounds=(lo, hi), method="bounded",
                        options={"xatol": 1e-10})
    tpk = r.x if -r.fun > vals[i] else ts[i]
    late = pops(10.0)
    return tpk, pops(tpk), late


if __name__ == "__main__":
    _, g12, l12 = rates(0.5)
    gs = 1 + g12
    print(f"kr=0.5 theta=pi/2 gamma12={g12:.15g} lambda12={l12:.15g}")
    T, p = square_scan(gs)
    print(f"square optimum T={T:.6f} peak={p:.12g} (T*gs/2={T*gs/2:.6f})")
    w, p = gaussian_scan(gs)
    print(f"gaussian optimum width={w:.6f} peak={p:.12g} (w*gs={w*gs:.6f})")
    for kr in [0.5, 1.0, 2.0]:
        for ch in ["s", "a"]:
            tpk, (pgg, ps, pa, pee), late = coherent_run(kr, channel=ch)
            print(f"coherent kr={kr} ch={ch} tpeak={tpk:.8f} Pgg={pgg:.10f} Ps={ps:.10f} "
                  f"Pa={pa:.10f} Pee={pee:.10f} | t=10: Ps={late[1]:.3e} Pa={late[2]:.3e}")
