"""
Shooting records and results.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class ShotRecord:
    s: float
    mismatch: float
    # 'end', 'departure', 'escape' or 'miss'
    terminal: str
    approached: bool

    def as_row(self):
        return (self.s, self.mismatch, self.terminal, self.approached)


@dataclass(frozen=True, eq=False)
class RootRecord:
    s: float
    profile: object
    residual: float

    def as_dict(self):
        return {'s': self.s, 'residual': self.residual, 'sup_norm': self.profile.sup_norm}


@dataclass(frozen=True, eq=False)
class ShootingResult:
    roots: tuple
    scan: tuple
    truncation_T: float

    @property
    def root_values(self):
        return [root.s for root in self.roots]

    def scan_rows(self):
        return [shot.as_row() for shot in self.scan]

    def as_dict(self):
        return {
            'truncation_T': self.truncation_T,
            'roots': [root.as_dict() for root in self.roots],
            'samples': len(self.scan),
        }
