"""The CCPO schema subset: main classes, object and data properties."""

from __future__ import annotations

from .graph import DATA_PROPERTY, OBJECT_PROPERTY, Graph, PropertyDef, Schema, SchemaClass
from .terms import BOOLEAN, CCO, CCPO, DECIMAL, DICBM, INTEGER, PROV, RDFS, STRING, TIMESTAMP, PrefixTable, iri


def ccpo(local: str):
    return iri(CCPO + local)


def prov(local: str):
    return iri(PROV + local)


PRODUCT = ccpo("Product")
COMPONENT = ccpo("Component")
GROUPED_COMPONENT = ccpo("GroupedComponent")
MATERIAL = ccpo("Material")
ACTIVITY = prov("Activity")
ACTOR = ccpo("Actor")
OWNERSHIP_RECORD = ccpo("OwnershipRecord")
INFORMATION_ARTIFACT = iri(CCO + "InformationBearingArtifact")
DOCUMENT = ccpo("Document")
BARCODE = ccpo("Barcode")
PROPERTY = iri(DICBM + "Property")
LOCATION = ccpo("Location")
HEALTH_RATING = ccpo("HealthRating")
DEMAND_LEVEL = ccpo("DemandLevel")
EOL_ROUTE = ccpo("EoLRoute")

TOP_CLASSES = (
    PRODUCT, MATERIAL, ACTIVITY, ACTOR, OWNERSHIP_RECORD, INFORMATION_ARTIFACT, PROPERTY, LOCATION,
)

HAS_COMPONENT = ccpo("hasComponent")
IS_COMPONENT_OF = ccpo("isComponentOf")
HAS_VIRGIN_MATERIAL = ccpo("hasVirginMaterial")
HAS_NON_VIRGIN_MATERIAL = ccpo("hasNonVirginMaterial")
WAS_GENERATED_BY = prov("wasGeneratedBy")
GENERATED = prov("generated")
USED = prov("used")
WAS_ASSOCIATED_WITH = prov("wasAssociatedWith")
WAS_INVOLVED_IN_ACTIVITY = ccpo("wasInvolvedInActivity")
HAS_OWNERSHIP_RECORD = ccpo("hasOwnershipRecord")
HAS_OWNER = ccpo("hasOwner")
HAS_INFORMATION_ARTIFACT = ccpo("hasInformationArtifact")
HAS_LOCATION = ccpo("hasLocation")
HAS_PROPERTY = ccpo("hasProperty")
HAS_HEALTH_STATE = ccpo("hasHealthState")
HAS_MARKET_DEMAND = ccpo("hasMarketDemand")
HAS_EOL_STRATEGY = ccpo("hasEoLStrategy")
SUGGESTED_EOL_ROUTE = ccpo("suggestedEoLRoute")

STARTED_AT = prov("startedAtTime")
ENDED_AT = prov("endedAtTime")
REFERENCE_SERVICE_LIFE = ccpo("referenceServiceLife")
ACTUAL_SERVICE_LIFE = ccpo("actualServiceLife")
AT_EOL = ccpo("atEoL")
EOL_STRATEGY_EXISTS = ccpo("eolStrategyExists")
DESIGNED_FOR_DISASSEMBLY = ccpo("designedForDisassembly")
INITIAL_HEALTH = ccpo("initialHealth")
HEALTH_DECLINE_RATE = ccpo("healthDeclineRate")
HAS_URL = ccpo("hasURL")
PROPERTY_VALUE = ccpo("propertyValue")
LABEL = iri(RDFS + "label")

GREEN, AMBER, RED = ccpo("green"), ccpo("amber"), ccpo("red")
HIGH, AVG, LOW = ccpo("high"), ccpo("avg"), ccpo("low")

ROUTE_NAMES = (
    "StrongReuseSuggestion",
    "WeakReuse_ConsiderRefurbishmentSoon",
    "CannotReuseDueToPoorProductHealth",
    "FollowManufacturerEoLStrategy",
    "RecycleDueToHighMarketDemand",
    "DoNotRecycleDueToLowDemand",
    "SendToLandfill",
)

_CLASSES = [
    (PRODUCT, ()),
    (COMPONENT, (PRODUCT,)),
    (GROUPED_COMPONENT, (PRODUCT,)),
    (MATERIAL, ()),
    (ACTIVITY, ()),
    (ACTOR, ()),
    (OWNERSHIP_RECORD, ()),
    (INFORMATION_ARTIFACT, ()),
    (DOCUMENT, (INFORMATION_ARTIFACT,)),
    (BARCODE, (INFORMATION_ARTIFACT,)),
    (PROPERTY, ()),
    (LOCATION, ()),
]

PRODUCT_OR_MATERIAL = (PRODUCT, MATERIAL)
TIMED = (ACTIVITY, OWNERSHIP_RECORD)

_OBJECT_PROPERTIES = [
    # name, domain, range, inverse, parents
    (HAS_COMPONENT, (PRODUCT,), (COMPONENT,), IS_COMPONENT_OF, ()),
    (IS_COMPONENT_OF, (COMPONENT,), (PRODUCT,), HAS_COMPONENT, ()),
    (HAS_VIRGIN_MATERIAL, PRODUCT_OR_MATERIAL, (MATERIAL,), None, ()),
    (HAS_NON_VIRGIN_MATERIAL, PRODUCT_OR_MATERIAL, (MATERIAL,), None, ()),
    (WAS_GENERATED_BY, PRODUCT_OR_MATERIAL, (ACTIVITY,), GENERATED, ()),
    (GENERATED, (ACTIVITY,), PRODUCT_OR_MATERIAL, WAS_GENERATED_BY, ()),
    (USED, (ACTIVITY,), PRODUCT_OR_MATERIAL, None, ()),
    (WAS_ASSOCIATED_WITH, (ACTIVITY,), (ACTOR,), None, ()),
    (WAS_INVOLVED_IN_ACTIVITY, (PRODUCT,), (ACTIVITY,), None, ()),
    (HAS_OWNERSHIP_RECORD, (PRODUCT,), (OWNERSHIP_RECORD,), None, ()),
    (HAS_OWNER, (OWNERSHIP_RECORD,), (ACTOR,), None, ()),
    (HAS_INFORMATION_ARTIFACT, PRODUCT_OR_MATERIAL, (INFORMATION_ARTIFACT,), None, ()),
    (HAS_LOCATION, (INFORMATION_ARTIFACT,), (LOCATION,), None, ()),
    (HAS_PROPERTY, PRODUCT_OR_MATERIAL, (PROPERTY,), None, ()),
    (HAS_HEALTH_STATE, (PRODUCT,), (HEALTH_RATING,), None, (HAS_PROPERTY,)),
    (HAS_MARKET_DEMAND, (PRODUCT,), (DEMAND_LEVEL,), None, (HAS_PROPERTY,)),
    (HAS_EOL_STRATEGY, (PRODUCT,), (INFORMATION_ARTIFACT,), None, ()),
    (SUGGESTED_EOL_ROUTE, (PRODUCT,), (EOL_ROUTE,), None, ()),
]

_DATA_PROPERTIES = [
    (STARTED_AT, TIMED, TIMESTAMP),
    (ENDED_AT, TIMED, TIMESTAMP),
    (REFERENCE_SERVICE_LIFE, (PRODUCT,), INTEGER),
    (ACTUAL_SERVICE_LIFE, (PRODUCT,), INTEGER),
    (AT_EOL, (PRODUCT,), BOOLEAN),
    (EOL_STRATEGY_EXISTS, (PRODUCT,), BOOLEAN),
    (DESIGNED_FOR_DISASSEMBLY, (PRODUCT,), BOOLEAN),
    (INITIAL_HEALTH, (PRODUCT,), DECIMAL),
    (HEALTH_DECLINE_RATE, (PRODUCT,), DECIMAL),
    (HAS_URL, (LOCATION,), STRING),
    (PROPERTY_VALUE, (PROPERTY,), DECIMAL),
    (LABEL, (), STRING),
]


def ccpo_schema() -> Schema:
    """Build the schema subset used by the IWP scenario and the EoL rules."""
    schema = Schema()
    for name, parents in _CLASSES:
        schema.add_class(SchemaClass(name, parents))
    schema.declare_disjoint(*TOP_CLASSES)
    # value vocabularies referenced as bare individuals by the rules
    schema.add_class(SchemaClass(HEALTH_RATING, (PROPERTY,), one_of=frozenset({GREEN, AMBER, RED})))
    schema.add_class(SchemaClass(DEMAND_LEVEL, (PROPERTY,), one_of=frozenset({HIGH, AVG, LOW})))
    schema.add_class(SchemaClass(EOL_ROUTE, (), one_of=frozenset(ccpo(n) for n in ROUTE_NAMES)))
    for name, domain, rng, inverse, parents in _OBJECT_PROPERTIES:
        schema.add_property(PropertyDef(name, OBJECT_PROPERTY, domain, rng, inverse, parents))
    for name, domain, datatype in _DATA_PROPERTIES:
        schema.add_property(PropertyDef(name, DATA_PROPERTY, domain, datatype))
    return schema


def new_graph() -> Graph:
    """An empty graph carrying the CCPO schema and default prefixes."""
    return Graph(ccpo_schema(), PrefixTable())
