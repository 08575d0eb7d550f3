"""Regenerate the bundled emoji table (codepoints<TAB>short_name, UTF-8).

Names follow the common shortcode convention (lowercase, underscores).
Multi-codepoint sequences use space-separated hex.
"""

import sys
import unicodedata

ENTRIES = [
    # faces
    ("1F600", "grinning"),
    ("1F601", "grin"),
    ("1F602", "joy"),
    ("1F603", "smiley"),
    ("1F604", "smile"),
    ("1F605", "sweat_smile"),
    ("1F606", "laughing"),
    ("1F607", "innocent"),
    ("1F609", "wink"),
    ("1F60A", "blush"),
    ("1F60B", "yum"),
    ("1F60D", "heart_eyes"),
    ("1F60E", "sunglasses"),
    ("1F60F", "smirk"),
    ("1F610", "neutral_face"),
    ("1F611", "expressionless"),
    ("1F612", "unamused"),
    ("1F613", "sweat"),
    ("1F614", "pensive"),
    ("1F615", "confused"),
    ("1F616", "confounded"),
    ("1F618", "kissing_heart"),
    ("1F61A", "kissing_closed_eyes"),
    ("1F61B", "stuck_out_tongue"),
    ("1F61C", "stuck_out_tongue_winking_eye"),
    ("1F61D", "stuck_out_tongue_closed_eyes"),
    ("1F61E", "disappointed"),
    ("1F61F", "worried"),
    ("1F620", "angry"),
    ("1F621", "rage"),
    ("1F622", "cry"),
    ("1F623", "persevere"),
    ("1F624", "triumph"),
    ("1F625", "disappointed_relieved"),
    ("1F628", "fearful"),
    ("1F629", "weary"),
    ("1F62A", "sleepy"),
    ("1F62B", "tired_face"),
    ("1F62C", "grimacing"),
    ("1F62D", "sob"),
    ("1F62E", "open_mouth"),
    ("1F62F", "hushed"),
    ("1F630", "cold_sweat"),
    ("1F631", "scream"),
    ("1F632", "astonished"),
    ("1F633", "flushed"),
    ("1F634", "sleeping"),
    ("1F635", "dizzy_face"),
    ("1F636", "no_mouth"),
    ("1F637", "mask"),
    ("1F641", "slightly_frowning_face"),
    ("1F642", "slightly_smiling_face"),
    ("1F643", "upside_down_face"),
    ("1F644", "face_with_rolling_eyes"),
    ("1F910", "zipper_mouth_face"),
    ("1F912", "face_with_thermometer"),
    ("1F913", "nerd_face"),
    ("1F914", "thinking"),
    ("1F915", "face_with_head_bandage"),
    ("1F917", "hugs"),
    ("1F922", "nauseated_face"),
    ("1F923", "rofl"),
    ("1F924", "drooling_face"),
    ("1F926", "facepalm"),
    ("1F927", "sneezing_face"),
    ("1F928", "raised_eyebrow"),
    ("1F92B", "shushing_face"),
    ("1F92C", "cursing_face"),
    ("1F92D", "hand_over_mouth"),
    ("1F92E", "vomiting_face"),
    ("1F92F", "exploding_head"),
    ("1F937", "shrug"),
    ("1F970", "smiling_face_with_hearts"),
    ("1F971", "yawning_face"),
    ("1F972", "smiling_face_with_tear"),
    ("1F974", "woozy_face"),
    ("1F975", "hot_face"),
    ("1F976", "cold_face"),
    ("1F97A", "pleading_face"),
    ("1F9D0", "monocle_face"),
    ("1F480", "skull"),
    ("2620", "skull_and_crossbones"),
    ("1F47B", "ghost"),
    ("1F47F", "imp"),
    ("1F608", "smiling_imp"),
    ("1F921", "clown_face"),
    ("1F4A9", "poop"),
    # gestures and body
    ("1F64F", "pray"),
    ("1F64C", "raised_hands"),
    ("1F645", "no_good"),
    ("1F646", "ok_woman"),
    ("1F648", "see_no_evil"),
    ("1F649", "hear_no_evil"),
    ("1F64A", "speak_no_evil"),
    ("1F440", "eyes"),
    ("1F442", "ear"),
    ("1F443", "nose"),
    ("1F444", "lips"),
    ("1F44A", "facepunch"),
    ("1F44B", "wave"),
    ("1F44C", "ok_hand"),
    ("1F44D", "thumbsup"),
    ("1F44E", "thumbsdown"),
    ("1F44F", "clap"),
    ("1F450", "open_hands"),
    ("1F446", "point_up_2"),
    ("1F447", "point_down"),
    ("1F448", "point_left"),
    ("1F449", "point_right"),
    ("261D", "point_up"),
    ("270A", "fist"),
    ("270B", "raised_hand"),
    ("270C", "v"),
    ("1F91D", "handshake"),
    ("1F91E", "crossed_fingers"),
    ("1F4AA", "muscle"),
    ("1F463", "footprints"),
    ("1F3C3", "runner"),
    ("1F6B6", "walking"),
    # alarm, emergency, violence-adjacent
    ("1F52B", "pistol"),
    ("1F52A", "hocho"),
    ("1F4A3", "bomb"),
    ("1F9E8", "firecracker"),
    ("1F4A5", "boom"),
    ("1F4A2", "anger"),
    ("1F4A8", "dash"),
    ("1F4A6", "sweat_drops"),
    ("1F4AB", "dizzy"),
    ("1F4AF", "100"),
    ("1F525", "fire"),
    ("1FA78", "drop_of_blood"),
    ("1FA79", "adhesive_bandage"),
    ("1F691", "ambulance"),
    ("1F692", "fire_engine"),
    ("1F693", "police_car"),
    ("1F694", "oncoming_police_car"),
    ("1F695", "taxi"),
    ("1F697", "car"),
    ("1F68C", "bus"),
    ("1F6A8", "rotating_light"),
    ("1F46E", "cop"),
    ("1F6E1", "shield"),
    ("26A0", "warning"),
    ("1F198", "sos"),
    ("26D4", "no_entry"),
    ("1F6AB", "no_entry_sign"),
    ("2757", "exclamation"),
    ("2755", "grey_exclamation"),
    ("2753", "question"),
    ("2754", "grey_question"),
    ("203C", "bangbang"),
    ("2049", "interrobang"),
    ("1F4E2", "loudspeaker"),
    ("1F4E3", "mega"),
    ("1F514", "bell"),
    ("1F515", "no_bell"),
    ("1F4F0", "newspaper"),
    ("1F4FA", "tv"),
    ("1F3E0", "house"),
    ("1F3E5", "hospital"),
    ("1F3EB", "school"),
    ("26EA", "church"),
    ("1F54A", "dove"),
    ("26B0", "coffin"),
    ("1F56F", "candle"),
    ("1F4CD", "round_pushpin"),
    ("1F4CC", "pushpin"),
    ("1F5FA", "world_map"),
    ("1F9ED", "compass"),
    ("2708", "airplane"),
    ("1F681", "helicopter"),
    ("1F687", "metro"),
    ("1F68D", "oncoming_bus"),
    ("1F6A2", "ship"),
    # symbols, weather, objects
    ("2B50", "star"),
    ("1F31F", "star2"),
    ("2728", "sparkles"),
    ("26A1", "zap"),
    ("2600", "sunny"),
    ("2601", "cloud"),
    ("2614", "umbrella"),
    ("1F308", "rainbow"),
    ("1F319", "crescent_moon"),
    ("1F30A", "ocean"),
    ("1F4A4", "zzz"),
    ("2764", "heart"),
    ("1F494", "broken_heart"),
    ("1F499", "blue_heart"),
    ("1F49A", "green_heart"),
    ("1F49B", "yellow_heart"),
    ("1F49C", "purple_heart"),
    ("1F5A4", "black_heart"),
    ("1F90D", "white_heart"),
    ("1F9E1", "orange_heart"),
    ("1F493", "heartbeat"),
    ("1F495", "two_hearts"),
    ("1F496", "sparkling_heart"),
    ("1F497", "heartpulse"),
    ("1F498", "cupid"),
    ("2763", "heavy_heart_exclamation"),
    ("1F48B", "kiss"),
    ("1F4F1", "iphone"),
    ("260E", "phone"),
    ("1F4DE", "telephone_receiver"),
    ("2709", "envelope"),
    ("1F4B0", "moneybag"),
    ("1F4B5", "dollar"),
    ("1F4B8", "money_with_wings"),
    ("1F393", "mortar_board"),
    ("26BD", "soccer"),
    ("1F3C0", "basketball"),
    ("26BE", "baseball"),
    ("1F3AE", "video_game"),
    ("1F3B5", "musical_note"),
    ("1F3B6", "notes"),
    ("1F3A4", "microphone"),
    ("1F3A7", "headphones"),
    ("1F37A", "beer"),
    ("1F37B", "beers"),
    ("1F377", "wine_glass"),
    ("1F378", "cocktail"),
    ("2615", "coffee"),
    ("1F382", "birthday"),
    ("1F370", "cake"),
    ("1F355", "pizza"),
    ("1F354", "hamburger"),
    ("1F363", "sushi"),
    ("1F436", "dog"),
    ("1F431", "cat"),
    ("1F40D", "snake"),
    ("1F426", "bird"),
    ("1F334", "palm_tree"),
    ("1F339", "rose"),
    ("1F33A", "hibiscus"),
    ("1F33B", "sunflower"),
    ("1F340", "four_leaf_clover"),
    ("1F384", "christmas_tree"),
    ("1F388", "balloon"),
    ("1F389", "tada"),
    ("1F38A", "confetti_ball"),
    ("1F3C6", "trophy"),
    ("1F6AC", "smoking"),
    ("231A", "watch"),
    ("23F0", "alarm_clock"),
    ("1F552", "clock3"),
    # flags (regional indicator pairs)
    ("1F1E7 1F1F7", "flag_br"),
    ("1F1FA 1F1F8", "flag_us"),
    ("1F1F5 1F1F9", "flag_pt"),
    ("1F1E6 1F1F7", "flag_ar"),
]


def main():
    seen_seq, seen_name = set(), set()
    lines = []
    for hexes, name in ENTRIES:
        cps = tuple(int(h, 16) for h in hexes.split())
        assert cps not in seen_seq, f"duplicate sequence {hexes}"
        assert name not in seen_name, f"duplicate name {name}"
        seen_seq.add(cps)
        seen_name.add(name)
        for cp in cps:
            unicodedata.name(chr(cp))  # raises for unassigned codepoints
        lines.append(f"{hexes}\t{name}\n")
    out = sys.argv[1]
    with open(out, "w", encoding="utf-8") as fh:
        fh.writelines(lines)
    print(f"wrote {len(lines)} entries to {out}")


if __name__ == "__main__":
    main()
