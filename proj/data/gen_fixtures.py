#!/usr/bin/env python3
"""Regenerates the benchmark app specs, mock provider scripts, and the seed
example dataset. Output is deterministic."""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
BENCH = os.path.join(HERE, "benchmark")
FIX = os.path.join(HERE, "fixtures")
os.makedirs(BENCH, exist_ok=True)
os.makedirs(FIX, exist_ok=True)


def program(rule, activity, bases, ops, batch=5):
    lines = [f"rule: {rule}"]
    targets = [f"{activity}/{wid}" for wid, _ in bases]
    lines.append("target: " + ", ".join(targets))
    for wid, value in bases:
        lines.append(f'base: {activity}/{wid} = "{value}"')
    for op in ops:
        lines.append(f"op: {op}")
    lines.append(f"batch: {batch}")
    return "\n".join(lines)


def generator_response(mutation_rule, program_text):
    return f"Mutation rule: {mutation_rule}\nTest generator:\n{program_text}\nEnd generator.\n"


def valid_response(constraints, values):
    lines = [f"Constraints: {constraints}"]
    for value in values:
        lines.append(f'The input is "{value}"')
    return "\n".join(lines)


APPS = [
    {
        "file": "app01_fontpad.json",
        "app_name": "fontpad",
        "activity": "MainActivity",
        "widgets": [("w_size", "Font Size", ["Font Size"])],
        "rules": [
            {"kind": "must_parse_int", "widget": "w_size",
             "hint": "please enter a number"},
        ],
        "crashes": [
            {"crash_id": "neg_font_size",
             "message": "java.lang.IllegalArgumentException: textSize must be >= 0",
             "condition": ["<", ["num", "w_size"], 0]},
        ],
        "constraints": "the font size must be a whole number",
        "valid": ["18"],
        "mutation_rule": "negate the numeric value",
        "bases": [("w_size", "18")],
        "ops": ["number_negate()"],
    },
    {
        "file": "app02_shoplite.json",
        "app_name": "shoplite",
        "activity": "FilterActivity",
        "widgets": [("w_price_min", "Min Price", ["Min Price"]),
                    ("w_price_max", "Max Price", ["Max Price"])],
        "rules": [
            {"kind": "must_parse_decimal", "widget": "w_price_min",
             "hint": "price must be a number"},
            {"kind": "must_parse_decimal", "widget": "w_price_max",
             "hint": "price must be a number"},
        ],
        "crashes": [
            {"crash_id": "inverted_range",
             "message": "java.lang.IllegalStateException: empty price range",
             "condition": [">", ["num", "w_price_min"], ["num", "w_price_max"]]},
        ],
        "constraints": "both prices must be non-negative numbers",
        "valid": ["10", "500"],
        "mutation_rule": "set the lower bound above the upper bound",
        "bases": [("w_price_min", "10"), ("w_price_max", "500")],
        "ops": ["violate_order(w_lo=FilterActivity/w_price_min, "
                "w_hi=FilterActivity/w_price_max, delta=1)"],
    },
    {
        "file": "app03_healthtrack.json",
        "app_name": "healthtrack",
        "activity": "VitalsActivity",
        "widgets": [("w_systolic", "Systolic", ["Systolic"]),
                    ("w_diastolic", "Diastolic", ["Diastolic"])],
        "rules": [
            {"kind": "must_parse_int", "widget": "w_systolic",
             "hint": "pressure must be a whole number"},
            {"kind": "must_parse_int", "widget": "w_diastolic",
             "hint": "pressure must be a whole number"},
            {"kind": "less_than", "widget": "w_diastolic", "other": "w_systolic",
             "hint": "diastolic must be lower than systolic"},
        ],
        "crashes": [
            {"crash_id": "inverted_vitals",
             "message": "java.lang.ArithmeticException: pulse pressure underflow",
             "condition": ["<", ["num", "w_systolic"], ["num", "w_diastolic"]]},
        ],
        "constraints": "two whole numbers with diastolic below systolic",
        "valid": ["120", "80"],
        "mutation_rule": "swap the two readings",
        "bases": [("w_systolic", "120"), ("w_diastolic", "80")],
        "ops": ["swap(wa=VitalsActivity/w_systolic, wb=VitalsActivity/w_diastolic)"],
    },
    {
        "file": "app04_datebook.json",
        "app_name": "datebook",
        "activity": "TripActivity",
        "widgets": [("w_start", "Start Date", ["Start Date"]),
                    ("w_end", "End Date", ["End Date"])],
        "rules": [
            {"kind": "date_before", "widget": "w_start", "other": "w_end",
             "hint": "end date must be after start date", "visibility": "explicit"},
        ],
        "crashes": [
            {"crash_id": "date_buffer_overflow",
             "message": "java.lang.StringIndexOutOfBoundsException in date formatter",
             "condition": ["len_exceeds", "w_end", 64]},
        ],
        "constraints": "two calendar dates in YYYY-MM-DD order with the start first",
        "valid": ["2025-03-01", "2025-03-15"],
        "mutation_rule": "repeat the date string until it overflows",
        "bases": [("w_start", "2025-03-01"), ("w_end", "2025-03-15")],
        "ops": ["repeat(count=10)"],
    },
    {
        "file": "app05_banklet.json",
        "app_name": "banklet",
        "activity": "TransferActivity",
        "widgets": [("w_amount", "Amount", ["Amount", "Transfer funds"])],
        "rules": [
            {"kind": "must_parse_decimal", "widget": "w_amount",
             "hint": "enter a valid amount"},
            {"kind": "min_value", "widget": "w_amount", "value": 0.01,
             "hint": "amount must be positive"},
        ],
        "crashes": [
            {"crash_id": "comma_parse",
             "message": "java.lang.NumberFormatException: unexpected ','",
             "condition": ["contains", "w_amount", ","]},
        ],
        "constraints": "a positive decimal amount without grouping separators",
        "valid": ["100.50"],
        "mutation_rule": "insert a thousands separator",
        "bases": [("w_amount", "100.50")],
        "ops": ['insert(pos=1, text=",")'],
    },
    {
        "file": "app06_notemark.json",
        "app_name": "notemark",
        "activity": "EditorActivity",
        "widgets": [("w_title", "Title", ["Title", "New note"])],
        "rules": [
            {"kind": "max_len", "widget": "w_title", "n": 20,
             "hint": "title is too long"},
        ],
        "crashes": [
            {"crash_id": "format_string",
             "message": "java.util.MissingFormatArgumentException",
             "condition": ["contains_class", "w_title", "format_specifier"]},
        ],
        "constraints": "a short plain-text title up to 20 characters",
        "valid": ["Meeting notes"],
        "mutation_rule": "inject a format specifier",
        "bases": [("w_title", "Meeting notes")],
        "ops": ["charset_inject(class=format_specifier, count=1, pos=end)"],
    },
    {
        "file": "app07_signupapp.json",
        "app_name": "signupapp",
        "activity": "RegisterActivity",
        "widgets": [("w_username", "Username", ["Username"]),
                    ("w_password", "Password", ["Password"])],
        "rules": [
            {"kind": "unique_in", "widget": "w_username",
             "set": ["admin", "root"], "hint": "username is taken"},
            {"kind": "requires_class", "widget": "w_password", "class": "upper",
             "hint": "at least one upper case character (A-Z) is required",
             "visibility": "explicit"},
            {"kind": "min_len", "widget": "w_password", "n": 8,
             "hint": "password must be at least 8 characters"},
        ],
        "crashes": [
            {"crash_id": "null_byte_crash",
             "message": "java.lang.IllegalArgumentException: NUL in credential",
             "condition": ["contains_class", "w_password", "null_byte"]},
        ],
        "constraints": "a free username and a password of 8 plus characters "
                       "with an upper case letter",
        "valid": ["alice", "Sunrise42"],
        "mutation_rule": "inject a NUL byte into each field",
        "bases": [("w_username", "alice"), ("w_password", "Sunrise42")],
        "ops": ["charset_inject(class=null_byte, count=1, pos=middle)"],
    },
    {
        "file": "app08_surveyor.json",
        "app_name": "surveyor",
        "activity": "FormActivity",
        "widgets": [("w_age", "Age", ["Age", "About you"])],
        "rules": [
            {"kind": "min_value", "widget": "w_age", "value": 0,
             "hint": "age between 0 and 120", "visibility": "explicit"},
            {"kind": "max_value", "widget": "w_age", "value": 120,
             "hint": "age between 0 and 120", "visibility": "explicit"},
        ],
        "crashes": [
            {"crash_id": "unhandled_parse",
             "message": "java.lang.NumberFormatException: for input string",
             "condition": ["unguarded_parse", "w_age", "int"]},
        ],
        "constraints": "a whole number between 0 and 120",
        "valid": ["35"],
        "mutation_rule": "append a unit suffix to the number",
        "bases": [("w_age", "35")],
        "ops": ['append(text=" years")'],
    },
    {
        "file": "app09_splitpay.json",
        "app_name": "splitpay",
        "activity": "BillActivity",
        "widgets": [("w_share1", "First Share", ["First Share"]),
                    ("w_share2", "Second Share", ["Second Share"]),
                    ("w_total", "Total", ["Total"])],
        "rules": [
            {"kind": "sum_equals", "widgets": ["w_share1", "w_share2"],
             "total": "w_total", "hint": "shares must add up to the total"},
        ],
        "crashes": [
            {"crash_id": "divide_by_zero",
             "message": "java.lang.ArithmeticException: divide by zero",
             "condition": ["==", ["num", "w_total"], 0]},
        ],
        "constraints": "two shares that sum to the total amount",
        "valid": ["30", "70", "100"],
        "mutation_rule": "zero out the total",
        "bases": [("w_total", "100")],
        "ops": ["number_set(value=0)"],
    },
    {
        "file": "app10_chatapp.json",
        "app_name": "chatapp",
        "activity": "ProfileActivity",
        "widgets": [("w_nickname", "Nickname", ["Nickname", "Profile"])],
        "rules": [
            {"kind": "max_len", "widget": "w_nickname", "n": 12,
             "hint": "nickname is too long"},
            {"kind": "forbids_chars", "widget": "w_nickname", "chars": "<>",
             "hint": "angle brackets are not allowed", "visibility": "explicit"},
        ],
        "crashes": [
            {"crash_id": "emoji_render",
             "message": "java.lang.IndexOutOfBoundsException: glyph cache",
             "condition": ["contains_class", "w_nickname", "emoji"]},
        ],
        "constraints": "a short nickname without angle brackets",
        "valid": ["sunny"],
        "mutation_rule": "append an emoji",
        "bases": [("w_nickname", "sunny")],
        "ops": ["charset_inject(class=emoji, count=1, pos=end)"],
    },
    {
        "file": "app11_stocker.json",
        "app_name": "stocker",
        "activity": "InventoryActivity",
        "widgets": [("w_sku", "SKU", ["SKU"]),
                    ("w_qty", "Quantity", ["Quantity"])],
        "rules": [
            {"kind": "pure_digits", "widget": "w_sku",
             "hint": "sku must contain digits only"},
            {"kind": "must_parse_int", "widget": "w_qty",
             "hint": "quantity must be a number"},
        ],
        "crashes": [
            {"crash_id": "sku_overflow",
             "message": "java.sql.SQLException: value too long for column SKU",
             "condition": ["len_exceeds", "w_sku", 32]},
        ],
        "constraints": "a digits-only sku and a whole-number quantity",
        "valid": ["12345", "10"],
        "mutation_rule": "pad both fields far beyond the column width",
        "bases": [("w_sku", "12345"), ("w_qty", "10")],
        "ops": ['pad(count=40, char="9")'],
    },
    {
        "file": "app12_taxform.json",
        "app_name": "taxform",
        "activity": "DeclareActivity",
        "widgets": [("w_income", "Annual Income", ["Annual Income"]),
                    ("w_deduction", "Deduction", ["Deduction"])],
        "rules": [
            {"kind": "must_parse_decimal", "widget": "w_income",
             "hint": "income must be a number"},
            {"kind": "must_parse_decimal", "widget": "w_deduction",
             "hint": "deduction must be a number"},
            {"kind": "less_than", "widget": "w_deduction", "other": "w_income",
             "hint": "deduction must be less than income"},
        ],
        "crashes": [
            {"crash_id": "negative_income",
             "message": "java.lang.IllegalArgumentException: negative tax base",
             "condition": ["<", ["num", "w_income"], 0]},
        ],
        "constraints": "two non-negative amounts with the deduction below the income",
        "valid": ["50000", "12000"],
        "mutation_rule": "negate both amounts",
        "bases": [("w_income", "50000"), ("w_deduction", "12000")],
        "ops": ["number_negate()"],
    },
]


def write_app_specs():
    script = {}
    for app in APPS:
        spec = {
            "app_name": app["app_name"],
            "pages": [{
                "activity_name": app["activity"],
                "widgets": [
                    {"id": wid, "descriptor": desc, "neighbors": neighbors}
                    for wid, desc, neighbors in app["widgets"]
                ],
                "rules": app["rules"],
                "crashes": app["crashes"],
            }],
        }
        with open(os.path.join(BENCH, app["file"]), "w") as f:
            json.dump(spec, f, indent=2)
            f.write("\n")

        prog = program(app["mutation_rule"], app["activity"], app["bases"], app["ops"])
        script[app["app_name"] + "/valid"] = [
            valid_response(app["constraints"], app["valid"])]
        script[app["app_name"] + "/generator"] = [
            generator_response(app["mutation_rule"], prog)]

    with open(os.path.join(FIX, "benchmark.script.json"), "w") as f:
        json.dump(script, f, indent=2)
        f.write("\n")


def write_config():
    config = {
        "clock": "simulated",
        "attempt_budget": 30,
        "time_budget_seconds": 1800,
        "k_examples": 5,
        "batch_size": 10,
        "llm_call_cap": 60,
        "sim_submission_seconds": 1.0,
        "sim_llm_call_seconds": 5.0,
    }
    with open(os.path.join(FIX, "benchmark.config.json"), "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")


def write_ksweep():
    spec = {
        "app_name": "ksweepapp",
        "pages": [{
            "activity_name": "KActivity",
            "widgets": [{"id": "w_field", "descriptor": "Field",
                         "neighbors": ["Field"]}],
            "rules": [{"kind": "must_parse_int", "widget": "w_field",
                       "hint": "a whole number is required"}],
            "crashes": [{"crash_id": "neg_field",
                         "message": "java.lang.IllegalArgumentException",
                         "condition": ["<", ["num", "w_field"], 0]}],
        }],
    }
    with open(os.path.join(FIX, "ksweep.app.json"), "w") as f:
        json.dump(spec, f, indent=2)
        f.write("\n")

    crash_prog = program("negate the value", "KActivity",
                         [("w_field", "7")], ["number_negate()"])
    miss_prog = program("append a zero", "KActivity",
                        [("w_field", "7")], ['append(text="0")'])
    script = {
        "ksweepapp/valid": [valid_response("a whole number", ["7"])],
        "ksweepapp/generator": {
            "cases": [{
                "contains": ["Example 5:"],
                "not_contains": ["Example 6:"],
                "responses": [generator_response("negate the value", crash_prog)],
            }],
            "default": [generator_response("append a zero", miss_prog)],
        },
    }
    with open(os.path.join(FIX, "ksweep.script.json"), "w") as f:
        json.dump(script, f, indent=2)
        f.write("\n")


SEED_PAGES = [
    ("loginapp", "LoginActivity", "Email", "Email;Sign in", "a@"),
    ("loginapp", "LoginActivity", "Password", "Password;Sign in", " "),
    ("shopcart", "CheckoutActivity", "Coupon Code", "Coupon;Apply", "%%OFF%%"),
    ("shopcart", "CheckoutActivity", "Quantity", "Quantity;Items", "-3"),
    ("weatherly", "SearchActivity", "City", "City;Search", "'; DROP TABLE--"),
    ("fitlog", "GoalActivity", "Daily Steps", "Steps;Goal", "1e99"),
    ("fitlog", "GoalActivity", "Weight", "Weight;kg", "0"),
    ("travelmate", "BookingActivity", "Departure", "Departure;Return", "2020-13-45"),
    ("travelmate", "BookingActivity", "Passengers", "Passengers;Adults", "9999999999"),
    ("musicbox", "PlaylistActivity", "Playlist Name", "Name;Create", "    "),
]

SEED_INPUTS = ["-1", "0", "", "NaN", "null", "2147483648", "-2147483649",
               "0.1.2", "1/0", "%s%s%s", "<script>", "\\u0000", "𝕏𝕐ℤ",
               "999999999999999999999", "-0", "1,000", "..", "--", "+",
               " 42 ", "0x1F", "1e-999", "\t", "🙂🙂🙂", "ＡＢＣ",
               "a" * 300, "e", "Infinity", "-Infinity", "2e308",
               "12 34", ".5.", "'quote'", '"dquote"', "line\\nbreak",
               "01-01-2025", "31/02/2025", "00000", "+-1", "1..2",
               "﷽", "ssssssssssssssssssssssssssssss", "%n", "{0}{1}",
               "0b101", "⁰¹²", "£$€", "¼", "Ω≈ç√", "𠜎𠜱"]


def write_seed_dataset():
    lines = []
    for i in range(50):
        app, page, widget, nearby, _ = SEED_PAGES[i % len(SEED_PAGES)]
        buggy = SEED_INPUTS[i % len(SEED_INPUTS)]
        if not buggy:
            buggy = SEED_PAGES[i % len(SEED_PAGES)][4] or "?"
        record = {
            "record_id": i + 1,
            "source": "seed",
            "context": {
                "app_name": app,
                "page_name": page,
                "input_widget": widget,
                "nearby_widgets": nearby,
                "dynamic_hint": "",
            },
            "mutation_rule": None,
            "buggy_input": buggy,
        }
        lines.append(json.dumps(record, ensure_ascii=False))
    with open(os.path.join(HERE, "seed_examples.jsonl"), "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    write_app_specs()
    write_config()
    write_ksweep()
    write_seed_dataset()
    print("fixtures written")
