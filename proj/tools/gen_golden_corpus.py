#!/usr/bin/env python3
# Copyright 2026 The Puda Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the golden fixture corpus: 25 page captures for one user who
plans leisure trips around hot springs, golf and hotels, plus that user's
profile and five travel-planning queries.

Output is deterministic; rerun after editing PAGES and commit the result.
"""

import json
import pathlib
from datetime import datetime, timedelta, timezone

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
USER = "hanako"
START = datetime(2026, 3, 2, 8, 15, 0, tzinfo=timezone.utc)

# (url, title, paragraphs, extra markup flavour)
# Post towns along the old Kiso road, walked as twenty short stages.
TOWNS = ["Niekawa", "Narai", "Yabuhara", "Miyanokoshi", "Fukushima", "Agematsu", "Suhara",
         "Nojiri", "Midono", "Tsumago", "Magome", "Ochiai", "Nakatsugawa", "Oi", "Okute",
         "Hosokute", "Mitake", "Fushimi", "Ota", "Unuma", "Kano"]


def nakasendo_stages():
    # Term counts fall in each keyword threshold band: a term present in
    # every stage scores 1.0 and one skipped in k stages scores (20 - k) / 20.
    out = []
    for i in range(20):
        parts = [f"From {TOWNS[i]} to {TOWNS[i + 1]} the trail"]
        if i not in (3, 11):
            parts.append("runs through cedar")
        if i not in (2, 7, 13):
            parts.append("past waymarks")
        if i not in (1, 5, 9, 15):
            parts.append("and a teahouse")
        if i not in (0, 4, 8, 12, 16):
            parts.append("over cobbled slopes")
        out.append(" ".join(parts) + ".")
    return out


NAKASENDO = nakasendo_stages()

PAGES = [
    ("https://onsen.example.jp/hakone/guide", "Hakone Onsen Guide",
     ["Hakone is the classic onsen escape from Tokyo. The hot springs here range from milky sulfur baths to clear alkaline water.",
      "Most ryokan include a private onsen, a kaiseki dinner and a quiet garden view. Weekday stays are cheaper and less crowded.",
      "Take the romancecar from Shinjuku and arrive in ninety minutes. The onsen town rewards a slow two day visit."]),
    ("https://onsen.example.jp/kusatsu", "Kusatsu Hot Springs: Yubatake and Public Baths",
     ["Kusatsu is famous for its yubatake, the steaming field of hot water in the middle of town.",
      "The acidic onsen water is strong. Visitors soak for short rounds and rest between baths.",
      "Evening lights at the yubatake are scenic and relaxing. Book a ryokan near the square to walk to every bath."]),
    ("https://golf.example.com/courses/kanto-top-10", "Top 10 Golf Courses in Kanto",
     ["These golf courses near Tokyo balance challenge and scenery. Several courses offer mountain views of Fuji.",
      "Green fees on weekdays start around 12000 yen including a cart. Weekend golf can cost twice as much.",
      "Our favourite golf course pairs a scenic back nine with an onsen bath in the clubhouse."]),
    ("https://golf.example.com/tips/driving-distance", "Five Drills for More Driving Distance",
     ["Driving distance comes from rotation, not muscle. Start with slow swings and a full shoulder turn.",
      "Practice the step drill at the range. Golf coaches use it to sequence hips before hands.",
      "Track every session. Distance gains of ten yards in a month are realistic for most golf players."]),
    ("https://hotels.example.com/kyoto/machiya", "Stay in a Kyoto Machiya Townhouse",
     ["A restored machiya offers a quiet alternative to large hotels in Kyoto.",
      "Most machiya sleep four guests and include a small garden, a cypress bath and a kitchen.",
      "Prices run from 30000 yen per night. Hotels downtown are cheaper but far less memorable."]),
    ("https://hotels.example.com/deals/spring", "Spring Hotel Deals Across Japan",
     ["Spring brings cherry blossoms and higher hotel prices. Book early or look at weekday deals.",
      "Business hotels in regional cities stay affordable. Resort hotels near onsen towns sell out first.",
      "Sign up for member rates. Many hotels discount direct bookings by ten percent."]),
    ("https://travel.example.com/itinerary/izu-3-days", "Izu Peninsula in Three Days",
     ["Day one covers Atami and its seaside onsen. Day two heads to Shuzenji, a quiet hot springs village with a bamboo forest.",
      "Day three is for the coast. Jogasaki cliffs are dramatic and scenic, especially in the morning.",
      "Rent a car for flexibility. Trains reach the main towns but buses are slow.",
      "Budget about 60000 yen per person including ryokan stays and meals."]),
    ("https://golf.example.com/resorts/onsen-golf", "Golf and Onsen Resorts: Play, Soak, Repeat",
     ["Few trips beat a round of golf followed by an onsen soak. These resorts put both on one property.",
      "Karuizawa offers cool summer golf and hotels with hot springs. Nasu has relaxed courses and an old onsen town.",
      "Packages with two rounds of golf, one night and dinner start at 45000 yen."]),
    ("https://weather.example.com/hakone/forecast", "Hakone Weekly Forecast",
     ["Expect light rain on Tuesday and clear skies from Thursday.",
      "Mountain temperatures drop fast after sunset. Pack a warm layer for evening onsen walks."]),
    ("https://food.example.jp/kaiseki-basics", "Kaiseki Dinner Basics",
     ["Kaiseki is a seasonal multi course dinner served at many ryokan.",
      "Courses move from appetizers to sashimi, grilled fish, simmered dishes and rice.",
      "Tell the ryokan about allergies when you book. The kitchen plans each course in advance."]),
    ("https://onsen.example.jp/etiquette", "Onsen Etiquette for First Timers",
     ["Wash thoroughly before entering the onsen. Keep your towel out of the water.",
      "Some onsen still restrict tattoos. Private baths at ryokan are a relaxing alternative.",
      "Drink water between soaks. Hot springs are wonderful but long baths can make you dizzy."]),
    ("https://golf.example.com/gear/best-drivers-2026", "Best Golf Drivers of 2026",
     ["This year's drivers focus on forgiveness. Larger heads keep off center strikes straight.",
      "We tested twelve drivers with golf players of every handicap. Adjustable weights helped most of them.",
      "Expect to pay 60000 to 90000 yen for a new driver. Last season's models are cheaper and nearly as good."]),
    ("https://travel.example.com/nakasendo/stages", "Walking the Nakasendo: Stage Notes", NAKASENDO),
    ("https://hotels.example.com/reviews/gora-kadan", "Review: Gora Kadan, Hakone",
     ["Gora Kadan is a luxury ryokan in a former imperial villa. Service is attentive and calm.",
      "Every room has a private onsen bath. The hot springs water is soft and slightly alkaline.",
      "It is expensive. Rates start above 100000 yen per night, but the experience is relaxing and memorable."]),
    ("https://news.example.com/tech/phone-launch", "New Phone Launch Draws Crowds",
     ["Shoppers lined up early for the new phone. The camera and battery saw the biggest upgrades.",
      "Prices start at 150000 yen. Analysts expect strong sales through the holiday season."]),
    ("https://golf.example.com/courses/hokkaido-summer", "Summer Golf in Hokkaido",
     ["Hokkaido golf courses open from May to October. Cool air and wide fairways make summer golf pleasant.",
      "Niseko and Furano pair golf with hot springs and mountain hotels.",
      "Flights from Tokyo take ninety minutes. A four day golf trip costs about 150000 yen with hotels."]),
    ("https://onsen.example.jp/beppu", "Beppu: The Hot Springs Capital",
     ["Beppu produces more hot water than almost anywhere in the world. Steam rises from vents all over town.",
      "Visit the hells, a set of colorful hot springs meant for viewing rather than bathing.",
      "Sand baths and mud baths add variety. Onsen hopping passes cover eight public baths."]),
    ("https://travel.example.com/packing/onsen-trip", "Packing List for an Onsen Trip",
     ["Ryokan supply yukata, towels and toiletries. Pack light.",
      "Bring a small bag for walking between baths and cash for local onsen entry.",
      "Comfortable shoes help in hot springs towns with steep streets."]),
    ("https://hotels.example.com/tokyo/business-hotels", "Best Business Hotels in Tokyo",
     ["Business hotels are compact, clean and close to stations.",
      "Rates range from 9000 to 18000 yen. Many hotels now add a public bath on the top floor.",
      "Check the room size before booking. Some rooms are smaller than ten square meters."]),
    ("https://golf.example.com/lessons/beginner", "Golf Lessons for Beginners",
     ["Start with a lesson package. Golf is easier to learn with feedback from the first swing.",
      "Most ranges offer five lessons for about 20000 yen.",
      "Practice putting at home. Short golf strokes decide most scores."]),
    ("https://travel.example.com/nikko-weekend", "A Weekend in Nikko",
     ["Nikko combines shrines, waterfalls and Kinugawa onsen in one trip.",
      "Stay in a riverside hotel with hot springs and visit Toshogu early to avoid crowds.",
      "Express trains from Asakusa take two hours. A weekend costs about 50000 yen per person."]),
    ("https://food.example.jp/onsen-tamago", "How Onsen Tamago Are Made",
     ["Onsen tamago are eggs slow cooked in hot springs water. The white stays soft while the yolk sets.",
      "At home, hold eggs at 65 degrees for thirty minutes. Serve with dashi and soy sauce."]),
    ("https://golf.example.com/courses/fuji-view", "Golf Courses with Fuji Views",
     ["Golf courses around Lake Kawaguchi frame Mount Fuji on almost every hole.",
      "Morning tee times give the clearest views. Afternoon clouds often cover the summit.",
      "Combine a round of golf with a lakeside hotel and onsen for a relaxing weekend."]),
    ("https://finance.example.com/travel-budget", "How to Budget for a Japan Trip",
     ["Set a daily budget for hotels, food and transport. Track spending in one app.",
      "Ryokan nights cost more but include dinner and breakfast.",
      "A comfortable trip runs 25000 to 40000 yen per day per person."]),
    ("https://onsen.example.jp/gero", "Gero Onsen in Gifu",
     ["Gero is one of the three famous hot springs of Japan. The water is smooth and slightly alkaline.",
      "Free foot baths line the river. The onsen town is compact and easy to walk.",
      "Stay two nights to try several ryokan baths. Gero is scenic in autumn."]),
]

SCRIPT = "<script>window.analytics = {track: function () {}};</script>"
STYLE = "<style>body { font-family: sans-serif; }</style>"


def html_for(title, paragraphs, i):
    body = "".join(f"<p>{p}</p>" for p in paragraphs)
    nav = "<nav><a href=\"/\">Home</a> &amp; <a href=\"/about\">About</a></nav>" if i % 3 == 0 else ""
    return (f"<!DOCTYPE html><html><head><title>{title}</title>{STYLE}{SCRIPT}</head>"
            f"<body>{nav}<article><h1>{title}</h1>{body}</article>"
            f"<!-- tracking pixel --></body></html>")


def main():
    assert len(PAGES) == 25, len(PAGES)
    (OUT / "golden").mkdir(parents=True, exist_ok=True)
    lines = []
    for i, (url, title, paragraphs) in enumerate(PAGES):
        at = START + timedelta(hours=7 * i, minutes=13 * i)
        capture = {
            "url": url,
            "title": title,
            "html_body": html_for(title, paragraphs, i),
            "captured_at": at.strftime("%Y-%m-%dT%H:%M:%S.000Z"),
            "user_id": USER,
        }
        lines.append(json.dumps(capture, ensure_ascii=False, sort_keys=True, separators=(",", ":")))
    (OUT / "golden_corpus.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    profile = {
        "name": "Hanako Sato",
        "age": 42,
        "date_of_birth": "1984-05-17",
        "gender": "female",
        "address": "2-3-1 Kichijoji Honcho, Musashino, Tokyo",
    }
    (OUT / "profile.json").write_text(json.dumps(profile, ensure_ascii=False, indent=2) + "\n",
                                      encoding="utf-8")

    queries = [
        {"id": "q1", "days": 2, "budget_jpy": 25000,
         "text": "Plan a 2-day trip from Tokyo for me with a total budget of 25,000 JPY."},
        {"id": "q2", "days": 3, "budget_jpy": 60000,
         "text": "Plan a relaxing 3-day trip for me with a budget of 60,000 JPY."},
        {"id": "q3", "days": 4, "budget_jpy": 100000,
         "text": "I have 4 days off next month. Suggest an itinerary within 100,000 JPY."},
        {"id": "q4", "days": 6, "budget_jpy": 180000,
         "text": "Plan a 6-day domestic trip for me. My budget is 180,000 JPY including hotels."},
        {"id": "q5", "days": 8, "budget_jpy": 250000,
         "text": "Create an 8-day travel plan that suits my interests, up to 250,000 JPY."},
    ]
    (OUT / "queries.json").write_text(json.dumps(queries, ensure_ascii=False, indent=2) + "\n",
                                      encoding="utf-8")


if __name__ == "__main__":
    main()
