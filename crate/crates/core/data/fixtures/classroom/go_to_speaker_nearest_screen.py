def execute_command(image):
    image_patch = ImagePatch(image)
    screen_patches = image_patch.find('projector screen')
    speaker_patches = image_patch.find('speaker')
    if len(screen_patches) == 0 or len(speaker_patches) == 0:
        return {'function': 'None', 'error': 'Could not find both objects.'}
    screen = screen_patches[0]
    speaker_patches.sort(key=lambda x: distance(x, screen))
    speaker = speaker_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (speaker.horizontal_center, speaker.vertical_center), 'box': [speaker.left, speaker.lower, speaker.right, speaker.upper]}
