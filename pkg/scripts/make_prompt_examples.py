"""Regenerate the worked examples shipped with the improved prompt bundle.

Builds both schemata programmatically so the YAML files stay in canonical
serialization, validates them, and writes them into src/dfmforge/prompts/.
"""

from pathlib import Path

from dfmforge.codec import serialize_yaml
from dfmforge.model import Additivity, Dependency, DfmSchema, Measure, validate

PROMPTS = Path(__file__).resolve().parent.parent / "src" / "dfmforge" / "prompts"


def example1() -> tuple[DfmSchema, DfmSchema, str]:
    draft = DfmSchema(
        "SHIPMENTS",
        (
            Measure("SHIPMENTS.weight"),
            Measure("SHIPMENTS.cost"),
            Measure("SHIPMENTS.insuranceValue"),
            Measure("SHIPMENTS.distance"),
        ),
        (
            Dependency("SHIPMENTS", "SHIPMENTS.weight"),
            Dependency("SHIPMENTS", "SHIPMENTS.cost"),
            Dependency("SHIPMENTS", "SHIPMENTS.insuranceValue"),
            Dependency("SHIPMENTS", "SHIPMENTS.distance"),
            Dependency("SHIPMENTS", "SHIPMENTS.shipDate"),
            Dependency("SHIPMENTS", "SHIPMENTS.deliveryDate"),
            Dependency("SHIPMENTS", "CUSTOMER.id"),
            Dependency("CUSTOMER.id", "CUSTOMER.name"),
            Dependency("CUSTOMER.id", "CUSTOMER.segment"),
            Dependency("SHIPMENTS", "CARRIER.id"),
            Dependency("CARRIER.id", "CARRIER.name"),
            Dependency("SHIPMENTS", "WAREHOUSE.id"),
            Dependency("WAREHOUSE.id", "WAREHOUSE.name"),
            Dependency("WAREHOUSE.id", "CITY.id"),
            Dependency("CITY.id", "CITY.name"),
        ),
    )
    refined = DfmSchema(
        "SHIPMENTS",
        (
            Measure("Weight"),
            Measure("Cost"),
            Measure("InsuranceValue", Additivity.SEMI_ADDITIVE),
            Measure("Distance", Additivity.NON_ADDITIVE),
        ),
        (
            Dependency("SHIPMENTS", "Weight"),
            Dependency("SHIPMENTS", "Cost"),
            Dependency("SHIPMENTS", "InsuranceValue (SUM-AVG)"),
            Dependency("SHIPMENTS", "Distance (AVG)"),
            Dependency("SHIPMENTS", "Date", "ship"),
            Dependency("SHIPMENTS", "Date", "delivery"),
            Dependency("Date", "Month"),
            Dependency("Month", "Year"),
            Dependency("SHIPMENTS", "Customer"),
            Dependency("Customer", "CustomerName"),
            Dependency("Customer", "CustomerSegment"),
            Dependency("SHIPMENTS", "Carrier"),
            Dependency("Carrier", "CarrierName"),
            Dependency("SHIPMENTS", "Warehouse"),
            Dependency("Warehouse", "WarehouseName"),
            Dependency("Warehouse", "City"),
            Dependency("City", "CityName"),
        ),
        descriptive=frozenset({"CarrierName", "WarehouseName"}),
        optional=frozenset({"CustomerSegment"}),
    )
    steps = """\
Let's refine the draft step by step.
(1) Rename: surrogate-key names like CUSTOMER.id are not intuitive, so I
rename CUSTOMER.id to Customer, CUSTOMER.name to CustomerName, and so on
for every attribute and measure; SHIPMENTS.shipDate becomes ShipDate and
SHIPMENTS.deliveryDate becomes DeliveryDate.
(2) Additivity: Weight and Cost sum correctly along every dimension, so
they stay additive. InsuranceValue can be summed over shipments but not
over time, so it is semi-additive and takes the (SUM-AVG) suffix.
Distance cannot be meaningfully summed at all, so it is non-additive and
takes the (AVG) suffix.
(3) Descriptive attributes: CarrierName and WarehouseName only describe
their parent and will never be grouped by, so I mark them descriptive.
No attribute needs discretization here.
(4) Optional attributes: not every customer has a segment, so I mark
CustomerSegment optional.
(5) Time hierarchies: ShipDate and DeliveryDate both denote dates, so I
merge them into a single shared Date hierarchy whose incoming arcs carry
the roles ship and delivery, then complete it with Month and Year.
(6) Removal: the end-user asked for nothing to be dropped, so every
attribute stays.
The refined schema is:
"""
    return draft, refined, steps


def example2() -> tuple[DfmSchema, DfmSchema]:
    draft = DfmSchema(
        "ADMISSIONS",
        (Measure("ADMISSIONS.cost"),),
        (
            Dependency("ADMISSIONS", "ADMISSIONS.cost"),
            Dependency("ADMISSIONS", "ADMISSIONS.date"),
            Dependency("ADMISSIONS", "PATIENT.id"),
            Dependency("PATIENT.id", "PATIENT.name"),
            Dependency("PATIENT.id", "PATIENT.birthDate"),
            Dependency("PATIENT.id", "PATIENT.gender"),
            Dependency("PATIENT.id", "CITY.id"),
            Dependency("CITY.id", "CITY.name"),
            Dependency("ADMISSIONS", "DOCTOR.id"),
            Dependency("DOCTOR.id", "DOCTOR.name"),
            Dependency("DOCTOR.id", "DOCTOR.specialty"),
            Dependency("ADMISSIONS", "WARD.id"),
            Dependency("WARD.id", "WARD.name"),
            Dependency("WARD.id", "HOSPITAL.id"),
            Dependency("HOSPITAL.id", "HOSPITAL.name"),
            Dependency("ADMISSIONS", "DIAGNOSIS.id"),
            Dependency("DIAGNOSIS.id", "DIAGNOSIS.description"),
            Dependency("DIAGNOSIS.id", "DIAGNOSIS.severity"),
            Dependency("ADMISSIONS", "INSURANCE.id"),
            Dependency("INSURANCE.id", "INSURANCE.company"),
        ),
    )
    refined = DfmSchema(
        "ADMISSIONS",
        (Measure("Cost"),),
        (
            Dependency("ADMISSIONS", "Cost"),
            Dependency("ADMISSIONS", "Date"),
            Dependency("Date", "Month"),
            Dependency("Month", "Year"),
            Dependency("ADMISSIONS", "Patient"),
            Dependency("Patient", "PatientName"),
            Dependency("Patient", "BirthDate"),
            Dependency("Patient", "Gender"),
            Dependency("Patient", "City"),
            Dependency("City", "CityName"),
            Dependency("ADMISSIONS", "Doctor"),
            Dependency("Doctor", "DoctorName"),
            Dependency("Doctor", "Specialty"),
            Dependency("ADMISSIONS", "Ward"),
            Dependency("Ward", "WardName"),
            Dependency("Ward", "Hospital"),
            Dependency("Hospital", "HospitalName"),
            Dependency("ADMISSIONS", "Diagnosis"),
            Dependency("Diagnosis", "Description"),
            Dependency("Diagnosis", "Severity"),
            Dependency("ADMISSIONS", "Insurance"),
            Dependency("Insurance", "Company"),
        ),
        descriptive=frozenset({"PatientName", "DoctorName", "WardName", "Description"}),
        optional=frozenset({"Severity"}),
    )
    return draft, refined


def main() -> None:
    d1, r1, steps = example1()
    d2, r2 = example2()
    for s in (d1, r1, d2, r2):
        report = validate(s)
        assert report.ok, report.to_dict()
    (PROMPTS / "example1_input.yaml").write_text(serialize_yaml(d1), encoding="utf-8")
    (PROMPTS / "example1_output.yaml").write_text(serialize_yaml(r1), encoding="utf-8")
    (PROMPTS / "example1_steps.txt").write_text(steps, encoding="utf-8")
    (PROMPTS / "example2_input.yaml").write_text(serialize_yaml(d2), encoding="utf-8")
    (PROMPTS / "example2_output.yaml").write_text(serialize_yaml(r2), encoding="utf-8")
    print("wrote 5 example files to", PROMPTS)


if __name__ == "__main__":
    main()
