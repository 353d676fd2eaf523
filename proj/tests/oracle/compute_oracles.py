"""Independent high-precision reference values frozen into oracle_values.hpp.

Run: python3 tests/oracle/compute_oracles.py
"""
import mpmath as mp

mp.mp.dps = 40


def show(name, value):
    print(f"{name} = {mp.nstr(value, 17)}")


# Stein solution for T = diag(1/2, 3/4), phi = (sqrt3/2, sqrt7/4): closed form
# S_ij = phi_i phi_j / (1 - t_i t_j).
t = [mp.mpf(1) / 2, mp.mpf(3) / 4]
phi = [mp.sqrt(3) / 2, mp.sqrt(7) / 4]
S = mp.matrix(2, 2)
for i in range(2):
    for j in range(2):
        S[i, j] = phi[i] * phi[j] / (1 - t[i] * t[j])
show("kSteinOffDiagonal", S[0, 1])
ev = mp.eigsy(S)[0]
show("kSteinEigLow", min(ev))
show("kSteinEigHigh", max(ev))
q = (mp.matrix([phi]) * mp.inverse(S) * mp.matrix(phi))[0]
show("kSurjectivityQ", q)
show("kCriterionIv", abs(mp.sqrt(q) - 1))
show("kBesselContractive", (phi[0] ** 2 + phi[1] ** 2) / (1 - t[1] ** 2))

# Lower Riesz bound of {e1, e1 + 0.1 e2}.
G = mp.matrix([[1, 1], [1, 1 + mp.mpf("0.01")]])
show("kLowerRieszNearParallel", min(mp.eigsy(G)[0]))

# Two-operator scalar sum: sum_n (2^-n - 4^-n)^2 and A_W = sum 16^-n.
show("kTwoOperatorSum", mp.mpf(4) / 3 - mp.mpf(16) / 7 + mp.mpf(16) / 15)
show("kTwoOperatorSumSeries", mp.nsum(lambda n: (mp.mpf(2) ** -n - mp.mpf(4) ** -n) ** 2, [0, mp.inf]))
show("kTwoOperatorAW", mp.mpf(16) / 15)

# Kernel defects.
show("kKernelDefectTriangle", mp.sqrt(mp.mpf(2) / 3))
show("kKernelDefectDuplicate", mp.mpf(1) / 2)

# Weighted frame threshold for A = 1, mu = 1/2.
show("kWeightedThreshold", mp.sqrt(1 - mp.mpf(1) / 4))

# Circulant C^3, phi = (1,1,0): S = [[2,1,1],[1,2,1],[1,1,2]].
C = mp.matrix([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
print("circulant eigenvalues", [mp.nstr(x, 17) for x in mp.eigsy(C)[0]])

# Aldroubi family: lambda_min of the closed-form orbit frame operator.
for d in (4, 8, 16):
    lam = [1 - mp.mpf(2) ** -(k + 1) for k in range(d)]
    b = [mp.sqrt(1 - l * l) for l in lam]
    M = mp.matrix(d, d)
    for i in range(d):
        for j in range(d):
            M[i, j] = b[i] * b[j] / (1 - lam[i] * lam[j])
    e = mp.eigsy(M)[0]
    show(f"kAldroubiLambdaMin{d}", min(e))
    show(f"kAldroubiLambdaMax{d}", max(e))
