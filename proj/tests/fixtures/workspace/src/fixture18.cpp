int amplify(short x) {
    return x * 100;
}

void driveOutput(short x) {
    int wave = amplify(x);
    short level = wave;
    int echo = level;
    echo = echo + 18;
}
