"""Frozen expected values.  Each entry notes how the number was obtained."""
from fractions import Fraction as F

# q^(N-N0) / (2 zeta(1)), evaluated by hand
NORMALIZATION = {(3, 4, 1): F(9), (3, 5, 1): F(27), (5, 3, 1): F(10), (3, 5, 2): F(9)}

# |2|^-1 q^-N zeta(1)^-1 at (3, 4, 1)
VOL_J_341 = F(2, 243)
BLOCK_SIZE_341 = 18          # 36 characters / 2 classes
C0_341 = 3**7                # q^(2N - N0)

# q^(N-N0)/2 times vol of the torus slice (q^-m): 27/3/2 and 81/3/2
MAIN_TERM_RHS = {(3, 4, 1, 1): F(9, 2), (3, 5, 1, 1): F(27, 2)}
BATTERY_LABELS = ("K[m]", "K[m] w K[m]", "K[m] a(p) K[m]", "K[m] a(p^2) K[m]", "K[m] w a(p) K[m]",
                  "K[m] n(1) K[m] (off N(H))")

# Haar volumes of K[1] g K[1] at p = 3 with vol(PGL2(Z_3)) = 8/9 and vol K[1] = 1/27
COSET_VOLUMES_31 = {"K[m]": F(1, 27), "K[m] w K[m]": F(1, 27), "K[m] a(p) K[m]": F(1, 9),
                    "K[m] a(p^2) K[m]": F(1, 3), "K[m] w a(p) K[m]": F(1, 9),
                    "K[m] n(1) K[m] (off N(H))": F(1, 27)}

# orbital averages over K[2] at p = 3, N0 = 1, xi = 1 (exhaustive grids, exact)
ORBITAL_THRESHOLDS = {"diag(1,1+p)": 3, "diag(1,1+p^2)": 4, "diag(1,1+p^3)": 5,
                      "[[1,p^2],[p^3,1]]": 5, "[[1/p,1],[0,1]]": 2}
ORBITAL_RATIONAL_VALUES = {"[[1,p^2],[p^3,1]]": {2: F(27), 3: F(243), 4: F(2187), 5: F(0)}}

# specrep examples
WHITTAKER_ALPHA1_Q3 = {0: 1, 2: 1}   # (n + 1) q^(-n/2)
ADJOINT_L_ALPHA1_Q3_Z1 = F(27, 8)
STANDARD_L_ALPHA1_Q3_HALF = 5.598076211353316
WHITTAKER_NORM_ALPHA1_Q3 = 3
RALLIS_ALPHA1_Q3 = 4.976067743425169   # (1 - 3^-1/2)^-2 * 8/9

# constants
FAMILY_C = {(11, 3): F(40, 81), (11, 2): F(5, 32)}
C0_11_3 = F(128, 1089)                  # coefficient of pi^2
VOL_GAMMA_G = {11: F(5, 6), 2: F(1, 12)}

# character counts
XN_COUNTS = {(3, 3): 12, (5, 2): 16, (3, 4): 36}
