"""The forecasting-model roster and its feature coding.

Every model is a point in the four-feature space (function class,
shrinkage scheme, tuning method, in-sample loss), crossed with the
data-poor / data-rich distinction. Names are the ASCII forms of the roster
labels, e.g. ``AR,BIC`` or ``(B1,alpha=hat),K-fold``; a few common variant
spellings are accepted via :func:`resolve_model_name`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..data.predictors import Rotation


class GClass(Enum):
    LINEAR = "linear"
    KERNEL_RBF = "kernel_rbf"
    TREE_ENSEMBLE = "tree_ensemble"


class Shrinkage(Enum):
    NONE = "none"
    RIDGE = "Ridge"
    PCA = "PCA"
    RIDGE_PCA = "Ridge-PCA"
    RIDGE_PCR = "Ridge-PCR"
    EN = "EN"
    LASSO = "Lasso"
    EN_PCA = "EN-PCA"
    LASSO_PCA = "Lasso-PCA"
    EN_PCR = "EN-PCR"
    LASSO_PCR = "Lasso-PCR"


class Tuner(Enum):
    AIC = "AIC"
    BIC = "BIC"
    POOS_CV = "POOS-CV"
    KFOLD_CV = "K-fold"


class Loss(Enum):
    QUADRATIC = "quadratic"
    EPS_INSENSITIVE = "eps_insensitive"


@dataclass(frozen=True)
class ModelSpec:
    name: str
    estimator: str  # ols | ridge | enet | krr | rf | svr
    g_class: GClass
    shrinkage: Shrinkage
    rotation: Rotation
    tuner: Tuner
    loss: Loss
    data_rich: bool
    kernel: str | None = None  # for krr/svr: 'linear' or 'rbf'
    en_alpha: float | str | None = None  # 0.0, 1.0 or 'cv'
    grid_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tuner in (Tuner.AIC, Tuner.BIC) and self.estimator != "ols":
            raise ValueError(f"{self.name}: {self.tuner.value} needs an OLS-estimable model")

    @property
    def feature_tags(self) -> dict:
        return {
            "NL": self.g_class is not GClass.LINEAR,
            "SH": self.shrinkage.value,
            "CV": self.tuner.value,
            "LF": self.loss is Loss.EPS_INSENSITIVE,
            "X": self.data_rich,
        }


def model_roster() -> dict:
    """All roster models keyed by canonical name."""
    specs: list[ModelSpec] = []

    # data-poor
    for tuner in Tuner:
        specs.append(ModelSpec(
            name=f"AR,{tuner.value}", estimator="ols", g_class=GClass.LINEAR,
            shrinkage=Shrinkage.NONE, rotation=Rotation.NONE, tuner=tuner,
            loss=Loss.QUADRATIC, data_rich=False,
        ))
    for tuner in (Tuner.POOS_CV, Tuner.KFOLD_CV):
        specs.append(ModelSpec(
            name=f"RRAR,{tuner.value}", estimator="ridge", g_class=GClass.LINEAR,
            shrinkage=Shrinkage.RIDGE, rotation=Rotation.NONE, tuner=tuner,
            loss=Loss.QUADRATIC, data_rich=False,
        ))
        specs.append(ModelSpec(
            name=f"RFAR,{tuner.value}", estimator="rf", g_class=GClass.TREE_ENSEMBLE,
            shrinkage=Shrinkage.NONE, rotation=Rotation.NONE, tuner=tuner,
            loss=Loss.QUADRATIC, data_rich=False,
        ))
        specs.append(ModelSpec(
            name=f"KRRAR,{tuner.value}", estimator="krr", g_class=GClass.KERNEL_RBF,
            shrinkage=Shrinkage.RIDGE, rotation=Rotation.NONE, tuner=tuner,
            loss=Loss.QUADRATIC, data_rich=False, kernel="rbf",
        ))
        for kern, tag in (("linear", "Lin"), ("rbf", "RBF")):
            specs.append(ModelSpec(
                name=f"SVR-AR,{tag},{tuner.value}", estimator="svr",
                g_class=GClass.LINEAR if kern == "linear" else GClass.KERNEL_RBF,
                shrinkage=Shrinkage.NONE, rotation=Rotation.NONE, tuner=tuner,
                loss=Loss.EPS_INSENSITIVE, data_rich=False, kernel=kern,
            ))

    # data-rich
    for tuner in Tuner:
        specs.append(ModelSpec(
            name=f"ARDI,{tuner.value}", estimator="ols", g_class=GClass.LINEAR,
            shrinkage=Shrinkage.PCA, rotation=Rotation.NONE, tuner=tuner,
            loss=Loss.QUADRATIC, data_rich=True,
        ))
    for tuner in (Tuner.POOS_CV, Tuner.KFOLD_CV):
        specs.append(ModelSpec(
            name=f"RRARDI,{tuner.value}", estimator="ridge", g_class=GClass.LINEAR,
            shrinkage=Shrinkage.RIDGE_PCA, rotation=Rotation.NONE, tuner=tuner,
            loss=Loss.QUADRATIC, data_rich=True,
        ))
        specs.append(ModelSpec(
            name=f"RFARDI,{tuner.value}", estimator="rf", g_class=GClass.TREE_ENSEMBLE,
            shrinkage=Shrinkage.PCA, rotation=Rotation.NONE, tuner=tuner,
            loss=Loss.QUADRATIC, data_rich=True,
        ))
        specs.append(ModelSpec(
            name=f"KRRARDI,{tuner.value}", estimator="krr", g_class=GClass.KERNEL_RBF,
            shrinkage=Shrinkage.RIDGE_PCR, rotation=Rotation.NONE, tuner=tuner,
            loss=Loss.QUADRATIC, data_rich=True, kernel="rbf",
        ))
        for kern, tag in (("linear", "Lin"), ("rbf", "RBF")):
            specs.append(ModelSpec(
                name=f"SVR-ARDI,{tag},{tuner.value}", estimator="svr",
                g_class=GClass.LINEAR if kern == "linear" else GClass.KERNEL_RBF,
                shrinkage=Shrinkage.PCA, rotation=Rotation.NONE, tuner=tuner,
                loss=Loss.EPS_INSENSITIVE, data_rich=True, kernel=kern,
            ))
        shrink_by_rot = {
            Rotation.B1: {"hat": Shrinkage.EN, "1": Shrinkage.LASSO, "0": Shrinkage.RIDGE},
            Rotation.B2: {"hat": Shrinkage.EN_PCA, "1": Shrinkage.LASSO_PCA, "0": Shrinkage.RIDGE_PCA},
            Rotation.B3: {"hat": Shrinkage.EN_PCR, "1": Shrinkage.LASSO_PCR, "0": Shrinkage.RIDGE_PCR},
        }
        for rot in (Rotation.B1, Rotation.B2, Rotation.B3):
            for atag, aval in (("hat", "cv"), ("1", 1.0), ("0", 0.0)):
                specs.append(ModelSpec(
                    name=f"({rot.value},alpha={atag}),{tuner.value}",
                    estimator="enet", g_class=GClass.LINEAR,
                    shrinkage=shrink_by_rot[rot][atag], rotation=rot, tuner=tuner,
                    loss=Loss.QUADRATIC, data_rich=True, en_alpha=aval,
                ))

    roster = {s.name: s for s in specs}
    assert len(roster) == len(specs)
    return roster


_ALIAS_SUBS = (
    ("KRR-ARDI", "KRRARDI"),
    ("KRR,ARDI", "KRRARDI"),
    ("KRR-AR", "KRRAR"),
    ("KRR,AR", "KRRAR"),
    ("RF-ARDI", "RFARDI"),
    ("RF-AR", "RFAR"),
    ("alpha=CV", "alpha=hat"),
)


def resolve_model_name(name: str, roster: dict | None = None) -> str:
    """Map a roster label (or a common variant spelling) to its canonical name."""
    roster = roster if roster is not None else model_roster()
    key = name.strip()
    if key in roster:
        return key
    for old, new in _ALIAS_SUBS:
        if key.startswith(old):
            key = new + key[len(old):]
            break
    if key in roster:
        return key
    raise KeyError(f"unknown model {name!r}; known models: {sorted(roster)}")
