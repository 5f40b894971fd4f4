"""
Fichier de configuration pour "plexpand" (linéarisation affine par morceaux)
"""

import os


# Nombre de processus légers pour l'énumération des pièces (surchargeable par la variable d'environnement PLEXPAND_JOBS)
JOBS: int = max(1, int(os.environ.get("PLEXPAND_JOBS", "1") or "1"))

# Résolution des systèmes affines par morceaux
ENUMERATION_CAP: int = 16  # s maximal pour l'énumération exhaustive (2^s systèmes linéaires)
SIGN_TOLERANCE: float = 1e-12  # relâchement des conditions de signe, relatif à 1 + ||z||
DEDUP_TOLERANCE: float = 1e-9  # deux racines plus proches que cela sont confondues
ROOT_RESIDUAL_TOLERANCE: float = 1e-10  # résidu maximal accepté pour une racine, relatif à 1 + ||cible||
MODULUS_MAX_ITERATIONS: int = 200
MODULUS_TOLERANCE: float = 1e-13

# Itérations de Newton
NEWTON_MAX_ITERATIONS: int = 50
NEWTON_RESIDUAL_TOLERANCE: float = 1e-13
NEWTON_STEP_TOLERANCE: float = 0.0
STAGNATION_ULPS: int = 4  # plancher d'arrondi : résidu stationnaire à 4 ulps près sur deux pas
RATE_MIN_STEP_FACTOR: float = 1e2  # pas admissibles pour l'estimation du taux : > 1e2 * eps

# Noyaux sécants sans singularité
SERIES_THRESHOLD: float = 2.0**-13  # en dessous, sinc/sinhc/artanhc utilisent leur série tronquée
SERIES_KERNEL_ORDER: int = 8  # ordre de troncature du noyau par série de Taylor (éléments personnalisés)

# Certificats de Lipschitz
SAMPLING_POINTS: int = 10_000  # échantillonnage de repli (non rigoureux) pour les éléments personnalisés
