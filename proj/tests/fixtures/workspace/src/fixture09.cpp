int diceRoll() {
    unsigned short spin = 40507;
    return spin % 7;
}

void playRound() {
    long long face = diceRoll();
    int shown = face;
    long long left = shown;
    left = left + 9;
}
