"""Canonical entity-label taxonomy for the fashion and luxury domain.

38 labels: 37 entity types plus O (outside). Every surface spelling seen in
annotation files or model output (spaced display names, all-caps tags, the
known typo variants) is resolved to exactly one canonical label through a
normalized alias index.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .errors import CorpusFormatError, UnknownLabelError


class Tier(enum.Enum):
    """Reporting-only grouping of labels; carries no scoring semantics."""

    CONTEXT_GENERAL = "ContextGeneral"
    CORPORATE_ENTITY = "CorporateEntity"
    INSTITUTION = "Institution"
    PERSON_ROLE = "PersonRole"
    PRODUCT = "Product"
    SUSTAINABILITY = "Sustainability"
    CULTURAL = "Cultural"
    OUTSIDE = "Outside"


_KEY_STRIP = re.compile(r"[\s\-.]+")


def normalize_key(raw: str) -> str:
    """Lowercase and drop whitespace, hyphens, and periods."""
    return _KEY_STRIP.sub("", raw.lower())


@dataclass(frozen=True)
class Label:
    """One taxonomy entry.

    canonical_name is the storage spelling used in BIO tags ("B-FastFashion");
    display_name is the spaced spelling used in prompt label lists.
    """

    canonical_name: str
    display_name: str
    tier: Tier
    description: str
    aliases: frozenset[str] = field(default=frozenset())

    @property
    def is_outside(self) -> bool:
        return self.tier is Tier.OUTSIDE

    def alias_keys(self) -> set[str]:
        """All normalized keys this label answers to."""
        keys = {normalize_key(self.canonical_name), normalize_key(self.display_name)}
        keys.add(normalize_key(self.canonical_name.upper()))
        keys.update(normalize_key(a) for a in self.aliases)
        return keys

    def __repr__(self) -> str:  # keep assertion output short
        return f"Label({self.canonical_name})"


# Table order: O first, then the 37 entity labels. Descriptions double as
# audit data for the exported taxonomy file.
_TABLE: tuple[tuple[str, str, Tier, str, tuple[str, ...]], ...] = (
    ("O", "O", Tier.OUTSIDE,
     "Outside (of a text segment)", ("Outside",)),
    ("Date", "Date", Tier.CONTEXT_GENERAL,
     "Temporal expressions (1854, Q2 2023, Nineties, September 21)", ()),
    ("Location", "Location", Tier.CONTEXT_GENERAL,
     "Physical location and area (Paris, Japan, Europe, Champs-Élysées)", ()),
    ("Event", "Event", Tier.CONTEXT_GENERAL,
     "Critical events (WW II, Olympics, IPO, Covid pandemic, Paris Fashion Week)", ()),
    ("MonetaryValue", "Monetary Value", Tier.CONTEXT_GENERAL,
     "Currency, price, sales, revenue ($2.65 billion, 4.6 million euros, CHF 400,000, etc.)", ()),
    ("House", "House", Tier.CORPORATE_ENTITY,
     "Fashion and luxury houses (Louis Vuitton, Cartier, Gucci, Chanel)", ()),
    ("Brand", "Brand", Tier.CORPORATE_ENTITY,
     "Sportswear, beauty and labels (Nike, Lululemon, Clinique)", ()),
    ("FastFashion", "Fast Fashion", Tier.CORPORATE_ENTITY,
     "Mass-market retailers (Zara, H&M, Uniqlo, Shein)", ()),
    ("PrivateCompany", "Private Company", Tier.CORPORATE_ENTITY,
     "Unlisted companies (Chanel SA, Stella McCartney Ltd, Valentino S.p.A)",
     ("PRIVAT COMPANY",)),
    ("ListedGroup", "Listed Group", Tier.CORPORATE_ENTITY,
     "Listed groups (LVMH, Hermès International SCA, Kering)", ()),
    ("HoldingTrust", "Holding Trust", Tier.CORPORATE_ENTITY,
     "Holding and family office (Agache, H51, Mousse Partners, Artémis)", ()),
    ("InvestmentFirm", "Investment Firm", Tier.CORPORATE_ENTITY,
     "Investment banks, PE funds, M&A firms (KKR, L Catterton, Mayhoola, Bernstein)", ()),
    ("MediaPublisher", "Media Publisher", Tier.INSTITUTION,
     "Media outlets (Bloomberg, Vogue, Business of Fashion, NYT)", ()),
    ("Hospitality", "Hospitality", Tier.INSTITUTION,
     "Luxury hospitality (Ritz Paris, Belmond hotel Cipriani, Venetian Macao)", ()),
    ("MuseumGallery", "Museum Gallery", Tier.INSTITUTION,
     "Exhibition spaces (Louvre, MET, Victoria & Albert, Pinault Collection)", ()),
    ("Retailer", "Retailer", Tier.INSTITUTION,
     "POS, department stores, and select shops (Bergdorf, Le Bon Marché, Takashimaya)", ()),
    ("Education", "Education", Tier.INSTITUTION,
     "Business and fashion schools (Polytechnic, Harvard, LSE, ESCP, Central Saint Martins, IFM)", ()),
    ("Organization", "Organization", Tier.INSTITUTION,
     "Legal, scientific, and cultural entities (CFDA, European Union, UNESCO, SEC)", ()),
    ("ArtisticDirector", "Artistic Director", Tier.PERSON_ROLE,
     "Lead creative of houses (Karl Lagerfeld, Daniel Lee, Sarah Burton, Alessandro Michele)", ()),
    ("Executive", "Executive", Tier.PERSON_ROLE,
     "C-level, board members (Jérôme Lambert, Sue Nabi, Pietro Beccari)", ()),
    ("Founder", "Founder", Tier.PERSON_ROLE,
     "Founder, creative, and owner (Ralph Lauren, Rei Kawakubo, Michael Kors)", ()),
    ("Chairperson", "Chairperson", Tier.PERSON_ROLE,
     "Chairman/Chairwoman (Bernard Arnault, Patrizio Bertelli, François-Henri Pinault)", ()),
    ("AnalystBanker", "Analyst Banker", Tier.PERSON_ROLE,
     "Equity analysts, M&A bankers (Luca Solca, Pierre Mallevays, Louise Singlehurst)", ()),
    ("KOL", "KOL", Tier.PERSON_ROLE,
     "Artists, celebrities, historical figures (Audrey Hepburn, BTS, Kanye West, Emma Watson)",
     ("KOL Key Opinion Leader", "Key Opinion Leader")),
    ("AthleteTeam", "Athlete Team", Tier.PERSON_ROLE,
     "Professional athletes, and teams (David Beckham, Serena Williams, Luna Rossa)", ()),
    ("Model", "Model", Tier.PERSON_ROLE,
     "Fashion models (Iman, Kate Moss, Adriana Lima, Naomi Campbell, Mariacarla Boscono)", ()),
    ("CreativeInsider", "Creative Insider", Tier.PERSON_ROLE,
     "Photographers, make-up artists, watchmakers (Nick Knight, Dominique Ropion, Gérald Genta)", ()),
    ("EditorJournalist", "Editor Journalist", Tier.PERSON_ROLE,
     "Editor-in-chief, fashion editors, journalists (Suzy Menkes, Anna Wintour, Carine Roitfeld)", ()),
    ("GarmCollection", "Garment Collection", Tier.PRODUCT,
     "Iconic garment and collections (Haute Couture, Bar suit, No.13 of McQueen, Jungle Dress)",
     ("Garment Collection",)),
    ("Cosmetic", "Cosmetic", Tier.PRODUCT,
     "Cosmetic products (Tilbury Glow palette, Crème de La Mer, YSL Nu, Viva Glam)", ()),
    ("Fragrance", "Fragrance", Tier.PRODUCT,
     "Perfumes, and EdT (Chanel No.5, Dior Sauvage, Terre d'Hermès, Tom Ford Black Orchid)", ()),
    ("BagTrvlGoods", "Bag Travel Goods", Tier.PRODUCT,
     "Bags, and leather goods (Hermès Birkin bag, Louis Vuitton Speedy bag, Chanel 2.55)",
     ("Bag Travel Goods",)),
    ("Jewelry", "Jewelry", Tier.PRODUCT,
     "Fine jewelry, and gems (Alhambra of Van Cleef & Arpels, Juste un Clou Cartier, Winston Blue)", ()),
    ("Timepiece", "Timepiece", Tier.PRODUCT,
     "Fine watches (Nautilus Patek Philippe, Reverso Jaeger-Lecoultrre, Rolex Oyster)",
     ("TIME PIECE",)),
    ("Footwear", "Footwear", Tier.PRODUCT,
     "High heels to sneakers (Rainbow of Ferragamo, Armadillo of McQueen, Air Force1)", ()),
    ("WineSpirit", "Wine Spirit", Tier.PRODUCT,
     "Wine and spirit (Château d'Yquem, Clos de Tart, Château Matras, Hennessy, Moet, Belvedere)", ()),
    ("Sustainability", "Sustainability", Tier.SUSTAINABILITY,
     "Relevant ESG factors and entities (Ethical Fashion Initiative, decoupling, biodiversity loss)", ()),
    ("CulturalArtifact", "Cultural Artifact", Tier.CULTURAL,
     "Songs, books, movies (The Devil wears Prada, American Gigolo, The College Dropout)", ()),
)

# Prompt label lists lead with the four general-context labels, then follow
# table order; O is never shown to a model.
_PROMPT_HEAD = ("Location", "Event", "MonetaryValue", "Date")


class Taxonomy:
    """Immutable label set with alias lookup; safe for shared reads."""

    def __init__(self, labels: tuple[Label, ...]) -> None:
        self.labels = labels
        self._by_canonical: dict[str, Label] = {}
        self._alias_index: dict[str, Label] = {}
        for label in labels:
            if label.canonical_name in self._by_canonical:
                raise ValueError(f"duplicate canonical name {label.canonical_name!r}")
            self._by_canonical[label.canonical_name] = label
            for key in label.alias_keys():
                owner = self._alias_index.get(key)
                if owner is not None and owner is not label:
                    raise ValueError(
                        f"alias key {key!r} claimed by both "
                        f"{owner.canonical_name} and {label.canonical_name}"
                    )
                self._alias_index[key] = label

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    @property
    def outside(self) -> Label:
        return self.labels[0]

    def entity_labels(self) -> tuple[Label, ...]:
        """The 37 non-O labels in table order."""
        return tuple(l for l in self.labels if not l.is_outside)

    def get(self, canonical_name: str) -> Label:
        try:
            return self._by_canonical[canonical_name]
        except KeyError:
            raise UnknownLabelError(canonical_name) from None

    def normalize(self, raw: str) -> Label:
        """Resolve any registered spelling of a label; raises UnknownLabelError."""
        try:
            return self._alias_index[normalize_key(raw)]
        except KeyError:
            raise UnknownLabelError(raw) from None

    def prompt_display_names(self) -> list[str]:
        """Display names in prompt order (general context first, O excluded)."""
        head = [self._by_canonical[c] for c in _PROMPT_HEAD]
        tail = [l for l in self.entity_labels() if l.canonical_name not in _PROMPT_HEAD]
        return [l.display_name for l in head + tail]

    def export_records(self, path: str | Path) -> None:
        """Write one label per line: canonical, display, tier, aliases, description."""
        lines = []
        for label in self.labels:
            aliases = "|".join(sorted(label.aliases))
            lines.append(
                f"{label.canonical_name}\t{label.display_name}\t{label.tier.value}"
                f"\t{aliases}\t{label.description}"
            )
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_records(cls, path: str | Path) -> "Taxonomy":
        labels = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise CorpusFormatError("taxonomy record needs 5 tab-separated fields", line=lineno)
            canonical, display, tier, aliases, description = parts
            labels.append(Label(
                canonical_name=canonical,
                display_name=display,
                tier=Tier(tier),
                description=description,
                aliases=frozenset(a for a in aliases.split("|") if a),
            ))
        return cls(tuple(labels))


@lru_cache(maxsize=1)
def builtin_taxonomy() -> Taxonomy:
    """The fixed 37+O taxonomy with all aliases registered."""
    return Taxonomy(tuple(
        Label(canonical_name=c, display_name=d, tier=t, description=desc,
              aliases=frozenset(extra))
        for c, d, t, desc, extra in _TABLE
    ))


def normalize_label(raw: str, taxonomy: Taxonomy | None = None) -> Label:
    """Module-level convenience; see Taxonomy.normalize."""
    return (taxonomy or builtin_taxonomy()).normalize(raw)


def prompt_display_names(taxonomy: Taxonomy | None = None) -> list[str]:
    return (taxonomy or builtin_taxonomy()).prompt_display_names()
