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
"""Regenerates data/taxonomy/sample_taxonomy.txt.

The sample list is synthetic: English labels in the style of a web content
category hierarchy, sized 26 / 256 / 810 across the three tiers. Tier-3
entries are hand-written where the fixtures need them and otherwise filled
from a fixed facet list, so the output is fully deterministic.
"""

import pathlib
import sys

TIER1 = {
    "Arts & Entertainment": ["Celebrities & Entertainment News", "Comics & Animation", "Events & Listings", "Fun & Trivia", "Humor", "Movies", "Music & Audio", "Performing Arts", "TV & Video", "Visual Art & Design"],
    "Autos & Vehicles": ["Bicycles & Accessories", "Boats & Watercraft", "Campers & RVs", "Classic Vehicles", "Commercial Vehicles", "Motor Vehicles", "Motorcycles", "Vehicle Maintenance", "Vehicle Parts & Accessories", "Vehicle Shopping"],
    "Beauty & Fitness": ["Beauty Pageants", "Body Art", "Cosmetic Procedures", "Cosmetology", "Face & Body Care", "Fashion & Style", "Fitness", "Hair Care", "Spas & Beauty Services", "Weight Loss"],
    "Books & Literature": ["Biographies & Memoirs", "Book Retailers", "Children's Literature", "E-Books", "Fan Fiction", "Literary Classics", "Magazines", "Poetry", "Writers Resources"],
    "Business & Industrial": ["Advertising & Marketing", "Aerospace & Defense", "Agriculture & Forestry", "Automotive Industry", "Business Education", "Business Finance", "Business Operations", "Chemicals Industry", "Construction & Maintenance", "Energy & Utilities"],
    "Computers & Electronics": ["CAD & CAM", "Computer Hardware", "Computer Security", "Consumer Electronics", "Electronics & Electrical", "Enterprise Technology", "Networking", "Programming", "Software", "Mobile Devices"],
    "Finance": ["Accounting & Auditing", "Banking", "Credit & Lending", "Financial Planning & Management", "Grants & Scholarships", "Insurance", "Investing", "Retirement & Pension", "Tax Preparation", "Currencies & Foreign Exchange"],
    "Food & Drink": ["Beverages", "Cooking & Recipes", "Food & Grocery Retailers", "Restaurants", "Local Cuisine", "Desserts & Sweets", "Wine & Sake", "Food Festivals", "Vegetarian Cuisine", "Baked Goods"],
    "Games": ["Arcade & Coin-Op Games", "Board Games", "Card Games", "Computer & Video Games", "Family-Oriented Games", "Gambling", "Online Games", "Puzzles & Brainteasers", "Roleplaying Games", "Table Games"],
    "Health": ["Aging & Geriatrics", "Alternative & Natural Medicine", "Health Conditions", "Health Education", "Medical Facilities & Services", "Mental Health", "Nutrition", "Oral & Dental Care", "Pharmacy", "Public Health"],
    "Hobbies & Leisure": ["Clubs & Organizations", "Crafts", "Merit Prizes & Contests", "Outdoors", "Paintball", "Radio Control & Modeling", "Recreational Aviation", "Special Occasions", "Water Activities", "Photography"],
    "Home & Garden": ["Bed & Bath", "Domestic Services", "Gardening & Landscaping", "Home Appliances", "Home Furnishings", "Home Improvement", "Home Safety & Security", "Home Storage & Shelving", "Kitchen & Dining", "Laundry"],
    "Internet & Telecom": ["Email & Messaging", "Mobile & Wireless", "Search Engines", "Service Providers", "Teleconferencing", "Web Apps & Online Tools", "Web Portals", "Web Services", "Social Platforms"],
    "Jobs & Education": ["Education", "Jobs", "Internships", "Language Learning", "Online Courses", "Primary & Secondary Schooling", "Standardized Tests", "Study Abroad", "Teaching & Classroom Resources", "Vocational Training"],
    "Law & Government": ["Government", "Legal", "Military", "Public Safety", "Social Services", "Elections", "Immigration", "Consumer Protection", "Regulations", "Courts & Judiciary"],
    "News": ["Business News", "Gossip & Tabloid News", "Health News", "Local News", "Politics", "Sports News", "Technology News", "Weather", "World News", "Science News"],
    "Online Communities": ["Blogging Resources & Services", "Dating & Personals", "File Sharing & Hosting", "Forum & Chat Providers", "Online Goodies", "Photo & Video Sharing", "Social Networks", "Virtual Worlds", "Fan Communities", "Q&A Sites"],
    "People & Society": ["Family & Relationships", "Kids & Teens", "Religion & Belief", "Seniors & Retirement", "Social Issues & Advocacy", "Social Sciences", "Subcultures & Niche Interests", "Ethnic & Identity Groups", "Volunteering", "Parenting"],
    "Pets & Animals": ["Animal Products & Services", "Pets", "Wildlife", "Veterinarians", "Aquariums", "Birds", "Cats", "Dogs", "Horses", "Zoos & Sanctuaries"],
    "Real Estate": ["Real Estate Listings", "Real Estate Services", "Property Development", "Timeshares & Vacation Properties", "Apartments & Residential Rentals", "Commercial Properties", "Property Management", "Home Inspections", "Mortgages", "Land & Lots"],
    "Reference": ["Directories & Listings", "General Reference", "Geographic Reference", "Humanities", "Language Resources", "Libraries & Museums", "Calendars", "Dictionaries & Encyclopedias", "How-To Guides"],
    "Science": ["Astronomy", "Biological Sciences", "Chemistry", "Computer Science", "Earth Sciences", "Ecology & Environment", "Engineering & Technology", "Mathematics", "Physics", "Scientific Equipment"],
    "Shopping": ["Antiques & Collectibles", "Apparel", "Auctions", "Classifieds", "Consumer Resources", "Discount & Outlet Stores", "Gifts & Special Event Items", "Luxury Goods", "Toys", "Souvenirs & Local Products"],
    "Sports": ["Baseball", "Basketball", "Combat Sports", "Cycling", "Golf", "Motor Sports", "Running & Marathons", "Skiing & Snowboarding", "Soccer", "Tennis"],
    "Travel": ["Air Travel", "Bus & Rail", "Car Rental & Taxi Services", "Cruises & Charters", "Hotels & Accommodations", "Hot Springs & Onsen", "Specialty Travel", "Tourist Destinations", "Travel Agencies & Services", "Travel Guides & Travelogues"],
    "Sensitive Subjects": ["Accidents & Disasters", "Addictions", "Crime", "Discrimination", "Drugs", "Firearms", "Self-Harm", "Violence", "Weapons"],
}

TIER3 = {
    ("Travel", "Hotels & Accommodations"): ["Bed & Breakfasts", "Hostels", "Luxury Hotels", "Ryokan & Traditional Inns", "Vacation Rentals"],
    ("Travel", "Hot Springs & Onsen"): ["Day Trip Onsen", "Onsen Resorts", "Open-Air Baths", "Private Baths"],
    ("Travel", "Tourist Destinations"): ["Beaches & Islands", "Mountain & Ski Resorts", "Historical Sites & Buildings", "Theme Parks", "Regional Parks & Gardens", "Zoos-Aquariums-Preserves"],
    ("Travel", "Air Travel"): ["Airport Parking & Transportation", "Airlines", "Low-Cost Carriers"],
    ("Travel", "Bus & Rail"): ["Bullet Trains", "Rail Passes", "Highway Buses"],
    ("Travel", "Specialty Travel"): ["Adventure Travel", "Agritourism", "Family Travel", "Ecotourism", "Wine Tourism"],
    ("Travel", "Travel Guides & Travelogues"): ["City Guides", "Itineraries", "Travel Blogs"],
    ("Sports", "Golf"): ["Golf Courses", "Golf Equipment", "Golf Lessons", "Golf Tournaments"],
    ("Sports", "Skiing & Snowboarding"): ["Ski Resorts", "Ski Equipment", "Snowboarding"],
    ("Food & Drink", "Restaurants"): ["Fine Dining", "Fast Food", "Ramen Shops", "Sushi Restaurants", "Cafes"],
    ("Food & Drink", "Local Cuisine"): ["Regional Specialties", "Street Food", "Seafood"],
    ("Food & Drink", "Wine & Sake"): ["Wineries", "Sake Breweries", "Wine Tasting"],
    ("Hobbies & Leisure", "Outdoors"): ["Camping", "Fishing", "Hiking & Trekking", "Hunting & Shooting"],
    ("Hobbies & Leisure", "Photography"): ["Camera Equipment", "Landscape Photography", "Photo Editing"],
    ("Arts & Entertainment", "Music & Audio"): ["K-Pop", "J-Pop", "Classical Music", "Concerts & Music Festivals", "Rock Music"],
    ("Arts & Entertainment", "Events & Listings"): ["Festivals", "Exhibitions", "Fireworks"],
    ("News", "Business News"): ["Company News", "Economy News", "Financial Markets News"],
    ("Finance", "Investing"): ["Stocks & Bonds", "Mutual Funds", "Real Estate Investment"],
}

FACETS = ["Guides", "News", "Services", "Communities", "Products", "Events"]

EXPECTED = (26, 256, 810)


def build():
    tier2_total = sum(len(v) for v in TIER1.values())
    if len(TIER1) != EXPECTED[0] or tier2_total != EXPECTED[1]:
        sys.exit(f"tier sizes off: {len(TIER1)} / {tier2_total}")
    fixed = sum(len(v) for v in TIER3.values())
    generic = [(a, b) for a, bs in TIER1.items() for b in bs if (a, b) not in TIER3]
    remaining = EXPECTED[2] - fixed
    base, extra = divmod(remaining, len(generic))

    lines = [
        "# Sample three-tier content category list (synthetic, English labels).",
        "# Regenerate with tools/gen_sample_taxonomy.py.",
        "# version: sample-2026.1",
    ]
    generic_index = 0
    for a, bs in TIER1.items():
        lines.append(f"/{a}")
        for b in bs:
            lines.append(f"/{a}/{b}")
            if (a, b) in TIER3:
                children = TIER3[(a, b)]
            else:
                n = base + (1 if generic_index < extra else 0)
                children = [FACETS[(generic_index + k) % len(FACETS)] for k in range(n)]
                generic_index += 1
            for c in children:
                lines.append(f"/{a}/{b}/{c}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "taxonomy" / "sample_taxonomy.txt"
    out.write_text(build(), encoding="utf-8")
    print(out)
