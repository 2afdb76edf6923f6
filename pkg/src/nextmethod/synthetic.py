"""Deterministic synthetic corpora with planted implementation patterns.

Generates JSONL corpus records in which chosen method families are
repeatedly added together (the patterns a miner should recover) among
noise commits that must not produce rules. Every family is a template
whose variants differ only in a salted literal, keeping within-family
similarity far above the clustering threshold while distinct families and
noise stay far below it; `generate` verifies both margins and refuses to
emit a corpus that would make tests lie.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .similarity import method_vector, similarity

# Each template carries exactly one {salt} slot (a numeric literal) so two
# variants differ by a single token.
FAMILY_TEMPLATES: dict[str, str] = {
    "menuCreate": """\
@Override
public boolean onCreateOptionsMenu(Menu menu) {{
    getMenuInflater().inflate(R.menu.menu_main, menu);
    MenuItem search = menu.findItem(R.id.action_search);
    search.setShowAsAction({salt});
    return true;
}}""",
    "menuSelect": """\
@Override
public boolean onOptionsItemSelected(MenuItem item) {{
    int id = item.getItemId();
    if (id == R.id.action_settings) {{
        startActivityForResult(new Intent(this, SettingsActivity.class), {salt});
        return true;
    }}
    return super.onOptionsItemSelected(item);
}}""",
    "mapAttach": """\
@Override
protected void onCreate(Bundle savedInstanceState) {{
    super.onCreate(savedInstanceState);
    setContentView(R.layout.activity_maps);
    SupportMapFragment mapFragment = (SupportMapFragment) getSupportFragmentManager()
            .findFragmentById(R.id.map);
    mapFragment.setRetainInstance(true);
    mapFragment.getMapAsync(this, {salt});
}}""",
    "mapReady": """\
@Override
public void onMapReady(GoogleMap googleMap) {{
    mMap = googleMap;
    LatLng marker = new LatLng(-{salt}, 151);
    mMap.addMarker(new MarkerOptions().position(marker).title("Marker in Sydney"));
    mMap.moveCamera(CameraUpdateFactory.newLatLng(marker));
}}""",
    "emailValid": """\
private boolean isValidEmail(String email) {{
    if (TextUtils.isEmpty(email)) {{
        emailField.setError(getString(R.string.error_field_required));
        return false;
    }}
    return email.length() > {salt} && Patterns.EMAIL_ADDRESS.matcher(email).matches();
}}""",
    "passwordValid": """\
private boolean isValidPassword(String password, String confirm) {{
    if (password == null || password.length() < {salt}) {{
        passwordField.setError("Too short");
        return false;
    }}
    return password.equals(confirm);
}}""",
    "prefsSave": """\
public void savePreferences(Context context) {{
    SharedPreferences.Editor editor = context.getSharedPreferences(PREFS_NAME, {salt}).edit();
    editor.putLong(KEY_TIMESTAMP, System.currentTimeMillis());
    editor.apply();
}}""",
    "prefsLoad": """\
public long loadPreferences(Context context) {{
    SharedPreferences prefs = context.getSharedPreferences(PREFS_NAME, MODE_PRIVATE);
    long fallback = {salt}L;
    return prefs.getLong(KEY_TIMESTAMP, fallback);
}}""",
    "drawerSelect": """\
@Override
public boolean onNavigationItemSelected(MenuItem navItem) {{
    int navId = navItem.getItemId();
    DrawerLayout drawer = (DrawerLayout) findViewById(R.id.drawer_layout);
    drawer.closeDrawer(GravityCompat.START, navId == {salt});
    return true;
}}""",
    "drawerBack": """\
@Override
public void onBackPressed() {{
    DrawerLayout drawer = (DrawerLayout) findViewById(R.id.drawer_layout);
    if (drawer.isDrawerOpen(GravityCompat.START)) {{
        drawer.closeDrawers();
        backPressCount = {salt};
    }} else {{
        super.onBackPressed();
    }}
}}""",
}

NOISE_TEMPLATES: tuple[str, ...] = (
    """\
private void bind{Salt}Row(ViewHolder holder, Cursor cursor) {{
    holder.titleView.setText(cursor.getString({salt}));
    holder.subtitleView.setText(cursor.getString({salt} + 1));
}}""",
    """\
static Response parse{Salt}Payload(byte[] body) throws IOException {{
    JsonReader reader = new JsonReader(new InputStreamReader(new ByteArrayInputStream(body)));
    reader.setLenient(body.length > {salt});
    return Response.from(reader);
}}""",
    """\
void animate{Salt}Badge(View target) {{
    ObjectAnimator spin = ObjectAnimator.ofFloat(target, "rotation", 0f, {salt}f);
    spin.setDuration({salt}0);
    spin.start();
}}""",
    """\
protected int purge{Salt}Cache(SQLiteDatabase db) {{
    int deleted = db.delete(TABLE_{SALT}, "age > ?", new String[] {{"{salt}"}});
    Log.d(TAG, "purged rows: " + deleted);
    return deleted;
}}""",
    """\
public synchronized void enqueue{Salt}Retry(Runnable task) {{
    backoffMillis = Math.min(backoffMillis * 2, {salt}000);
    retryHandler.postDelayed(task, backoffMillis);
}}""",
    """\
private String describe{Salt}Sensor(SensorEvent event) {{
    StringBuilder sb = new StringBuilder("sensor:");
    sb.append(event.sensor.getType()).append('@').append({salt});
    return sb.toString();
}}""",
)

_SALT_WORDS = (
    "Amber", "Birch", "Cobalt", "Dune", "Ember", "Fjord", "Garnet", "Harbor",
    "Indigo", "Juniper", "Krill", "Lumen", "Maple", "Nimbus", "Onyx", "Pike",
    "Quartz", "Raven", "Sable", "Tundra", "Umber", "Vesper", "Willow", "Xenon",
)


@dataclass(frozen=True)
class PlantSpec:
    """Plant `count` commits, each adding one variant of every family in one file."""

    families: tuple[str, ...]
    count: int
    window: str = "train"  # train | validation | test


@dataclass
class SyntheticCorpus:
    records: list[dict]
    canonical: dict[str, str]  # family -> salt-canonical variant text
    planted_commits: dict[str, list[str]] = field(default_factory=dict)

    def jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.jsonl(), encoding="utf-8")


def family_variant(family: str, salt: int) -> str:
    return FAMILY_TEMPLATES[family].format(salt=salt)


_WINDOWS = {
    # timestamp ranges hitting the 0.8/0.1/0.1 blocks of [100000, 199999]
    "train": (101_000, 178_000),
    "validation": (181_000, 188_000),
    "test": (191_000, 199_000),
}


def generate(
    plants: list[PlantSpec],
    noise_train: int = 12,
    noise_validation: int = 2,
    noise_test: int = 4,
    seed: int = 7,
    include_filtered_noise: bool = True,
    clustering_threshold: float = 0.90,
    verify: bool = True,
) -> SyntheticCorpus:
    """Build a corpus with the requested plants plus noise.

    Noise commits add two unrelated methods in two different files, so they
    can never form a transaction; with `include_filtered_noise` the train
    window also gets one 1-method and one 11-method commit that the commit
    filter must drop. Anchor commits pin the corpus time range so the
    split boundaries are stable.
    """
    rng = random.Random(seed)
    records: list[dict] = []
    planted: dict[str, list[str]] = {"train": [], "validation": [], "test": []}
    family_variants: dict[str, list[str]] = {key: [] for key in FAMILY_TEMPLATES}
    seq = 0

    def next_id(window: str) -> str:
        nonlocal seq
        seq += 1
        return f"{window}-{seq:04d}"

    def noise_method(with_salt: int | None = None) -> str:
        template = rng.choice(NOISE_TEMPLATES)
        word = rng.choice(_SALT_WORDS) + rng.choice(_SALT_WORDS)
        salt = with_salt if with_salt is not None else rng.randint(11, 89)
        return template.format(Salt=word, SALT=word.upper(), salt=salt)

    def commit_record(window: str, timestamp: int, files: list[tuple[str, str]]) -> dict:
        commit_id = next_id(window)
        return {
            "repo": f"sample/app{(seq % 5) + 1}",
            "commit": commit_id,
            "timestamp": timestamp,
            "files": [
                {"path": path, "before": None, "after": source} for path, source in files
            ],
        }

    def wrap_class(name: str, methods: list[str]) -> str:
        body = "\n\n".join("    " + m.replace("\n", "\n    ") for m in methods)
        return f"public class {name} {{\n{body}\n}}\n"

    # Anchors pin d_s and d_e.
    records.append(
        commit_record(
            "train",
            100_000,
            [
                ("app/src/anchor/StartA.java", wrap_class("StartA", [noise_method()])),
                ("app/src/anchor/StartB.java", wrap_class("StartB", [noise_method()])),
            ],
        )
    )
    records.append(
        commit_record(
            "test",
            199_999,
            [
                ("app/src/anchor/EndA.java", wrap_class("EndA", [noise_method()])),
                ("app/src/anchor/EndB.java", wrap_class("EndB", [noise_method()])),
            ],
        )
    )

    for spec in plants:
        lo, hi = _WINDOWS[spec.window]
        for k in range(spec.count):
            timestamp = lo + (hi - lo) * k // max(spec.count, 1) + rng.randint(0, 37)
            variants = []
            for family in spec.families:
                text = family_variant(family, rng.randint(10, 97))
                family_variants[family].append(text)
                variants.append(text)
            class_name = "".join(f.capitalize() for f in spec.families)[:40] + "Activity"
            record = commit_record(
                spec.window,
                min(timestamp, hi),
                [(f"app/src/main/{class_name}.java", wrap_class(class_name, variants))],
            )
            records.append(record)
            planted[spec.window].append(record["commit"])

    for window, count in (("train", noise_train), ("validation", noise_validation), ("test", noise_test)):
        lo, hi = _WINDOWS[window]
        for _ in range(count):
            timestamp = rng.randint(lo, hi)
            files = [
                (f"app/src/noise/N{seq}A.java", wrap_class(f"N{seq}A", [noise_method()])),
                (f"app/src/noise/N{seq}B.java", wrap_class(f"N{seq}B", [noise_method()])),
            ]
            records.append(commit_record(window, timestamp, files))

    if include_filtered_noise:
        lo, hi = _WINDOWS["train"]
        records.append(
            commit_record(
                "train",
                rng.randint(lo, hi),
                [(f"app/src/noise/Single{seq}.java", wrap_class("Single", [noise_method()]))],
            )
        )
        records.append(
            commit_record(
                "train",
                rng.randint(lo, hi),
                [
                    (
                        f"app/src/noise/Tangle{seq}.java",
                        wrap_class("Tangle", [noise_method(with_salt=20 + i) for i in range(11)]),
                    )
                ],
            )
        )

    records.sort(key=lambda r: r["timestamp"])
    canonical = {key: family_variant(key, 53) for key in FAMILY_TEMPLATES}
    corpus = SyntheticCorpus(records=records, canonical=canonical, planted_commits=planted)
    if verify:
        _verify_margins(corpus, family_variants, clustering_threshold)
    return corpus


def _verify_margins(
    corpus: SyntheticCorpus,
    family_variants: dict[str, list[str]],
    threshold: float,
) -> None:
    """Refuse corpora whose planted geometry would not survive clustering."""
    vectors = {
        key: [method_vector(v) for v in variants] + [method_vector(corpus.canonical[key])]
        for key, variants in family_variants.items()
    }
    noise_vectors = [
        method_vector(NOISE_TEMPLATES[i].format(Salt=w, SALT=w.upper(), salt=37))
        for i, w in ((0, "Amber"), (1, "Cobalt"), (2, "Ember"), (3, "Garnet"), (4, "Indigo"), (5, "Krill"))
    ]
    for key, vecs in vectors.items():
        for i in range(len(vecs)):
            for j in range(i + 1, len(vecs)):
                score = similarity(vecs[i], vecs[j])
                if score <= threshold:
                    raise ValueError(
                        f"family {key} variants fell to similarity {score:.3f}, "
                        f"not strictly above {threshold}"
                    )
    keys = sorted(vectors)
    for a in range(len(keys)):
        others = [vectors[keys[b]][0] for b in range(len(keys)) if b != a] + noise_vectors
        for other in others:
            score = similarity(vectors[keys[a]][0], other)
            if score >= threshold:
                raise ValueError(
                    f"family {keys[a]} is {score:.3f}-similar to unrelated code, "
                    f"would merge at threshold {threshold}"
                )
